"""Self-contained JSON report envelope shared by all CLI commands."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from . import __version__

SCHEMA_VERSION = 1


@dataclass
class Report:
    command: str
    parameters: dict
    results: object
    spec_hash: str | None = None
    timings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "toolVersion": __version__,
            "command": self.command,
            "specHash": self.spec_hash,
            "parameters": self.parameters,
            "results": self.results,
            "timings": self.timings,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, default=_coerce)


def _coerce(obj):
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj)}")


class Stopwatch:
    def __init__(self):
        self.marks = {}
        self._t0 = time.perf_counter()

    def mark(self, name):
        self.marks[name] = round(time.perf_counter() - self._t0, 4)
        return self.marks[name]

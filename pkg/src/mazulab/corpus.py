"""Executable registry of the named example domains with expected labels.

Each expectation carries a verbatim provenance quote.  Entries marked
notMachineCheckable record distinctions a finite graph cannot separate
(path vs. plain connectivity variants); they are skipped by the runner.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .classifier import (
    INCONCLUSIVE,
    NOT_FIN,
    BoundaryVerdict,
    classify_point,
)
from .domain import DomainSpec
from .errors import UnknownExample
from .obstacles import (
    BoxFrames,
    CantorBase,
    CantorLevels,
    CombTeeth,
    FingerTailHull,
    JanaCircles,
    PlanSegment,
    RayFan,
    RempeBrooms,
    SineChain,
    Static,
)
from .solids import Box, Ball, Difference, DyadicSlabStack, FingerForest, TowerRow, Union

NOT_CHECKABLE = "notMachineCheckable"


@dataclass(frozen=True)
class Probe:
    point: tuple
    r0: float
    expectations: dict
    quote: str
    label: str = ""


@dataclass
class CorpusEntry:
    name: str
    build: object
    probes: list
    k_max: int
    policy_den: int
    truncation: str = ""

    def spec(self) -> DomainSpec:
        return self.build()

    def to_json(self):
        return {
            "name": self.name,
            "spec": self.spec().to_json(),
            "probes": [
                {
                    "point": list(p.point),
                    "r0": p.r0,
                    "expectations": p.expectations,
                    "provenanceQuote": p.quote,
                }
                for p in self.probes
            ],
            "kMax": self.k_max,
            "hPolicy": f"r/{self.policy_den}",
            "truncation": self.truncation,
        }


def _registry() -> dict:
    reg = {}

    def add(entry):
        reg[entry.name] = entry

    q_uniform = "If $\\Omega$ is a uniform domain, then $\\Omega$ is locally connected at the boundary."
    add(CorpusEntry(
        "unit-square",
        lambda: DomainSpec("unit-square", 2, Box((0, 0), (1, 1)), feature_size=1.0),
        [
            Probe((0.0, 0.0), 0.2,
                  {"finitelyConnected": True, "nConnected": [1],
                   "locallyAccessible": True, "omegaUnionX0LocallyConnected": True,
                   "bdryConnectedImKleinen": True, "bdryLocallyConnected": True,
                   "complementConnectedImKleinen": True, "complementLocallyConnected": True},
                  q_uniform, "corner"),
            Probe((0.0, 0.5), 0.2,
                  {"finitelyConnected": True, "nConnected": [1], "locallyAccessible": True},
                  q_uniform, "edge"),
        ],
        k_max=4, policy_den=256))

    q_slit = ("Then $\\Omega$ is finitely connected at the boundary but not locally connected "
              "at the boundary.")
    add(CorpusEntry(
        "slit-disc",
        lambda: DomainSpec("slit-disc", 2, Ball((0, 0), 1.0),
                           [Static(PlanSegment((-1.0, 0.0), (0.0, 0.0)))],
                           feature_size=0.5),
        [
            Probe((-0.5, 0.0), 0.4,
                  {"finitelyConnected": True, "nConnected": [2], "locallyAccessible": True},
                  q_slit, "slit-middle"),
            Probe((0.0, 0.0), 0.3,
                  {"finitelyConnected": True, "nConnected": [1]},
                  q_slit, "slit-tip"),
            Probe((0.0, 1.0), 0.3,
                  {"finitelyConnected": True, "nConnected": [1]},
                  q_slit, "circle-point"),
        ],
        k_max=4, policy_den=256))

    add(CorpusEntry(
        "comb-1",
        lambda: DomainSpec("comb-1", 2, Box((-1, 0), (1, 2)),
                           [CombTeeth(k_min=2, y_top=1.0, include_zero=True)],
                           feature_size=0.5),
        [
            Probe((0.0, 0.0), 0.3,
                  {"finitelyConnected": False, "nAtEveryScale": 1},
                  "Then $N(r)=1$ for all $r>0$, but $\\Omega$ is not finitely connected at $x_0$.",
                  "accumulation-foot"),
        ],
        k_max=4, policy_den=256,
        truncation="teeth kept while 1/k - 1/(k+1) >= h; tail covered by a vertical-striped hull"))

    q_comb2 = ("Then $\\Omega$ is locally connected at $x_1$, while $X \\setminus \\Omega$ is not "
               "connected im kleinen at $x_1$.")
    q_comb2b = ("Moreover, $\\Omega\\cup\\{x_2\\}$ is not locally connected at $x_2$, while "
                "$\\bdry \\Omega$ is locally pathconnected at $x_2$.")
    add(CorpusEntry(
        "comb-2",
        lambda: DomainSpec("comb-2", 2, Box((0, 0), (2, 2)),
                           [CombTeeth(k_min=1, y_top=1.0, include_zero=False)],
                           feature_size=0.5),
        [
            Probe((0.0, 1.0), 0.3,
                  {"nConnected": [1], "complementConnectedImKleinen": False},
                  q_comb2, "tooth-top-accumulation"),
            Probe((0.0, 0.0), 0.3,
                  {"omegaUnionX0LocallyConnected": False, "bdryLocallyConnected": True},
                  q_comb2b, "corner"),
        ],
        k_max=4, policy_den=256,
        truncation="teeth kept while 1/k - 1/(k+1) >= h; tail covered by a vertical-striped hull"))

    add(CorpusEntry(
        "thick-comb",
        lambda: DomainSpec("thick-comb", 2,
                           Difference(Box((0, 0), (2, 2)), DyadicSlabStack(1.0)),
                           feature_size=0.5),
        [
            Probe((0.0, 0.0), 0.3,
                  {"complementLocallyConnected": True, "bdryConnectedImKleinen": False},
                  "Then $X \\setminus \\Omega$ is locally pathconnected at $(0,0)$, while "
                  "$\\bdry \\Omega$ is not connected im kleinen at $(0,0)$.",
                  "slab-accumulation"),
        ],
        k_max=4, policy_den=256,
        truncation="slab stack is an exact membership predicate; no truncation"))

    add(CorpusEntry(
        "ex1",
        lambda: DomainSpec("ex1", 2, Box((0, 0), (2, 2)), [RayFan()], feature_size=0.5),
        [
            Probe((0.0, 0.0), 0.5,
                  {"locallyAccessible": True, "finitelyConnected": False},
                  "Then $(0,0)$ is locally accessible from $\\Omega$, while $\\Omega$ is not "
                  "finitely connected at $0$.",
                  "ray-apex"),
        ],
        k_max=3, policy_den=256,
        truncation="rays kept while the angular gap resolves at unit radius; tail fan hulled"))

    add(CorpusEntry(
        "rempe",
        lambda: DomainSpec("rempe", 2, Box((-1, -1), (1, 1)), [RempeBrooms()],
                           feature_size=0.5),
        [
            Probe((0.0, 0.0), 0.4,
                  {"bdryConnectedImKleinen": True, "complementConnectedImKleinen": True,
                   "bdryLocallyConnected": NOT_CHECKABLE,
                   "complementLocallyConnected": NOT_CHECKABLE},
                  "Then $\\bdry\\Omega$ and $X \\setminus \\Omega$ are pathconnected im kleinen "
                  "at $(0,0)$, while neither of them is locally connected at $(0,0)$.",
                  "broom-chain-limit"),
        ],
        k_max=4, policy_den=256,
        truncation="brooms and handles kept at gap >= h; per-broom floors and global tail hulled"))

    add(CorpusEntry(
        "iterated-sine",
        lambda: DomainSpec("iterated-sine", 2, Box((-1, -1), (1, 1)), [SineChain()],
                           feature_size=0.5),
        [
            Probe((0.0, 0.0), 0.25,
                  {"bdryLocallyConnected": True, "complementLocallyConnected": True,
                   "bdryPathconnectedImKleinen": NOT_CHECKABLE,
                   "complementPathconnectedImKleinen": NOT_CHECKABLE},
                  "Then $\\bdry\\Omega$ and $X \\setminus \\Omega$ are locally connected at "
                  "$(0,0)$, while neither of them is pathconnected im kleinen at $(0,0)$.",
                  "sine-chain-limit"),
        ],
        k_max=4, policy_den=256,
        truncation="oscillation tails below wavelength h/4 hulled per curve; chain tail hulled"))

    q_cantor = ("Then $\\Omega$ and $\\Omega'$ are both uncountably connected domains and "
                "locally connected or $2$-connected at all their boundary points.")

    def cantor_omega():
        return DomainSpec("cantor-omega", 2, Box((-2, -2), (2, 2)),
                          [CantorBase(level=0.0), CantorLevels()], feature_size=0.5)

    add(CorpusEntry(
        "cantor-omega", cantor_omega,
        [
            Probe((0.0, 0.0), 0.4,
                  {"finitelyConnected": True, "nConnected": [1, 2], "locallyAccessible": True},
                  q_cantor, "cantor-corner"),
            Probe((0.1, 0.5), 0.08,
                  {"finitelyConnected": True, "nConnected": [1, 2]},
                  q_cantor, "level-line-interior"),
        ],
        k_max=4, policy_den=256,
        truncation="base line realized as generation ceil(log3(1/h))+2; levels kept while gaps >= h"))

    add(CorpusEntry(
        "cantor-omega-prime",
        lambda: DomainSpec("cantor-omega-prime", 2, Box((-2, -2), (2, 2)),
                           [CantorBase(level=0.0), CantorLevels(),
                            Static(PlanSegment((-1.0, 0.0), (0.0, 0.0)))],
                           feature_size=0.5),
        [
            Probe((-0.5, 0.0), 0.4,
                  {"finitelyConnected": True, "nConnected": [1, 2]},
                  q_cantor, "slit-middle"),
            Probe((0.0, 0.0), 0.25,
                  {"finitelyConnected": True, "nConnected": [1, 2]},
                  q_cantor, "slit-end-cantor-corner"),
        ],
        k_max=4, policy_den=256,
        truncation="as cantor-omega plus an exact slit segment"))

    # -- 3D -----------------------------------------------------------------

    add(CorpusEntry(
        "r3-finconn",
        lambda: DomainSpec("r3-finconn", 3,
                           Difference(Box((0, -1, -1), (1, 1, 1)), FingerForest()),
                           [FingerTailHull(0.1, 0.0, 1.0)], feature_size=0.5),
        [
            Probe((0.0, 0.0, 0.0), 0.2,
                  {"finitelyConnected": True, "complementLocallyConnected": False},
                  "Then $\\Omega$ is locally connected at the boundary, while $X \\setminus "
                  "\\Omega$ is not locally connected at $(0,0,0)$.",
                  "disk-accumulation"),
        ],
        k_max=3, policy_den=32,
        truncation="disk-cylinder forest is an exact membership predicate"))

    add(CorpusEntry(
        "r3-compl-locconn",
        lambda: DomainSpec("r3-compl-locconn", 3,
                           Union(Box((0, 0, 0), (1, 1, 1)), TowerRow(0.0, 2.0)),
                           feature_size=0.5),
        [
            Probe((0.0, 0.0, 1.5), 0.3,
                  {"locallyAccessible": False, "complementLocallyConnected": True,
                   "bdryLocallyConnected": False},
                  "In this case $\\mathbf{R}^3 \\setminus \\Omega$ is locally connected at every "
                  "point, while $\\bdry \\Omega$ is not locally connected at the points in "
                  "$A=\\{(0,0,z): 1 < z \\le 2\\}$. Moreover the points in $A$ are not "
                  "accessible from $\\Omega$.",
                  "tower-accumulation-axis"),
        ],
        k_max=3, policy_den=32,
        truncation="tower row is an exact membership predicate"))

    add(CorpusEntry(
        "r3-locconn-locacc",
        lambda: DomainSpec("r3-locconn-locacc", 3, Box((-1, -1, -1), (1, 1, 1)),
                           [BoxFrames(0.0, 1.0)], feature_size=0.5),
        [
            Probe((0.0, 0.0, 0.5), 0.25,
                  {"bdryLocallyConnected": True, "locallyAccessible": False,
                   "finitelyConnected": False},
                  "Then $\\bdry\\Omega$ is locally connected, but no point $(0,0,z)\\in"
                  "\\bdry\\Omega$ is locally accessible from $\\Omega$ when $0<z \\le 1$. "
                  "Moreover, $\\Omega$ is not finitely connected at these points.",
                  "frame-axis"),
        ],
        k_max=3, policy_den=32,
        truncation="frames kept while the inter-frame gap >= h; tail hulled with free z travel"))

    add(CorpusEntry(
        "ex-jana",
        lambda: DomainSpec("ex-jana", 3, Box((-1, -1, -1), (1, 1, 1)),
                           [JanaCircles(0.0, 1.0)], feature_size=0.5),
        [
            Probe((0.0, 0.0, 0.5), 0.2,
                  {"locallyAccessible": True, "finitelyConnected": False},
                  "Then any boundary point $x_0 \\in \\bdry \\Omega$ is locally accessible from "
                  "$\\Omega$, but $\\Omega$ is not finitely connected at any boundary point "
                  "$(0,0,z)$ with $0<z\\le1$.",
                  "circle-pinch-axis"),
        ],
        k_max=3, policy_den=32,
        truncation="circles kept while the top gap 2^-j >= h; tail disk hulled with free z travel"))

    return reg


REGISTRY = _registry()


def list_examples():
    return sorted(REGISTRY)


def build_example(name: str) -> CorpusEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownExample(name) from None


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _flag_series(verdict: BoundaryVerdict, key: str):
    out = []
    for s in verdict.scales:
        if key == "accessible":
            out.append(s.accessible)
        elif key.startswith("omega"):
            out.append(s.suite["omega"].locally_connected)
        elif key == "bdry_ik":
            out.append(s.suite["boundary"].im_kleinen)
        elif key == "bdry_lc":
            out.append(s.suite["boundary"].locally_connected)
        elif key == "compl_ik":
            out.append(s.suite["complement"].im_kleinen)
        elif key == "compl_lc":
            out.append(s.suite["complement"].locally_connected)
    return out


_SERIES_KEYS = {
    "locallyAccessible": "accessible",
    "omegaUnionX0LocallyConnected": "omega",
    "bdryConnectedImKleinen": "bdry_ik",
    "bdryLocallyConnected": "bdry_lc",
    "complementConnectedImKleinen": "compl_ik",
    "complementLocallyConnected": "compl_lc",
}


def evaluate_probe(verdict: BoundaryVerdict, expectations: dict) -> list:
    """Rows of {flag, expected, actual, pass|skipped} for one probe point."""
    rows = []
    cls = verdict.classification
    for flag, expected in sorted(expectations.items()):
        if expected == NOT_CHECKABLE:
            rows.append({"flag": flag, "expected": expected, "actual": None,
                         "status": "skipped"})
            continue
        if flag == "finitelyConnected":
            if cls.kind == INCONCLUSIVE:
                actual = None
            else:
                actual = cls.finitely_connected_evidence
            ok = actual is expected
        elif flag == "nConnected":
            actual = cls.n if cls.kind == "NConnected" else None
            ok = cls.kind == "NConnected" and cls.n in expected
        elif flag == "nAtEveryScale":
            ns = [s.n for s in verdict.scales]
            actual = ns
            ok = all(n == expected for n in ns)
        elif flag in _SERIES_KEYS:
            series = _flag_series(verdict, _SERIES_KEYS[flag])
            known = [v for v in series if v is not None]
            if not known:
                actual, ok = None, False
            elif expected:
                actual = all(known)
                ok = actual is True
            else:
                actual = not (False in known)
                ok = False in known
        else:
            actual, ok = None, False
        rows.append({"flag": flag, "expected": expected, "actual": actual,
                     "status": "pass" if ok else "fail"})
    return rows


def run_corpus(names=None, *, k_max=None, policy_den=None, suite_scales="all",
               progress=None) -> dict:
    """Classify every probe of the requested entries and compare labels.

    Also accumulates the cross-cutting evidence the acceptance suite needs:
    implication-audit violations and the contact-count monotonicity check on
    ladders whose H stays clear of x0 throughout.
    """
    names = list(names) if names else list_examples()
    report = {"entries": {}, "auditViolations": [], "monotonicityViolations": [],
              "pass": True, "timings": {}}
    for name in names:
        entry = build_example(name)
        spec = entry.spec()
        t0 = time.perf_counter()
        probe_rows = []
        for probe in entry.probes:
            den = policy_den or entry.policy_den
            km = k_max if k_max is not None else entry.k_max
            verdict = classify_point(
                spec, probe.point, probe.r0, km,
                h_policy=lambda r: r / den,
                suite_scales=list(range(km + 1)) if suite_scales == "all" else suite_scales,
            )
            rows = evaluate_probe(verdict, probe.expectations)
            report["auditViolations"].extend(
                {**v, "entry": name, "probe": list(probe.point)} for v in verdict.audit_violations
            )
            # monotonicity of N on ladders with H clear throughout
            if all(a.hfree_state() == "true" for a in verdict.ladder):
                ns = [a.n_contact for a in verdict.ladder]
                for k in range(len(ns) - 1):
                    if ns[k] > ns[k + 1]:
                        report["monotonicityViolations"].append(
                            {"entry": name, "probe": list(probe.point), "N": ns})
                        break
            probe_rows.append({
                "point": list(probe.point),
                "label": probe.label,
                "classification": str(verdict.classification),
                "rows": rows,
            })
            if progress:
                progress(name, probe, rows)
        report["entries"][name] = {"probes": probe_rows}
        report["timings"][name] = time.perf_counter() - t0
    for e in report["entries"].values():
        for p in e["probes"]:
            for row in p["rows"]:
                if row["status"] == "fail":
                    report["pass"] = False
    if report["auditViolations"] or report["monotonicityViolations"]:
        report["pass"] = False
    return report

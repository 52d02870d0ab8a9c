"""Command-line front door.

Exit codes: 0 success, 1 analysis mismatch (corpus or separation-lab
failures), 2 usage error.  All numeric options accept exact rationals
like ``1/128``.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction

import click
import numpy as np

from .classifier import classify_point, scale_ladder
from .completion import boundary_fibers, total_boundedness_profile
from .corpus import REGISTRY, build_example, run_corpus
from .domain import DomainSpec
from .errors import MazulabError
from .metric import DmBound, dm_bounds, dm_exact, inner_distance, nearest_cell
from .raster import rasterize
from .report import Report, Stopwatch
from .seplab import SepLabConfig, run_suite


def _rational(_ctx, _param, value):
    if value is None:
        return None
    try:
        return float(Fraction(value))
    except (ValueError, ZeroDivisionError) as e:
        raise click.BadParameter(f"expected a rational like 1/128, got {value!r}") from e


def _point(_ctx, _param, value):
    if value is None:
        return None
    try:
        return tuple(float(Fraction(v.strip())) for v in value.split(","))
    except (ValueError, ZeroDivisionError) as e:
        raise click.BadParameter(f"expected coordinates like '0.5,0.25', got {value!r}") from e


def _load_spec(path: str) -> DomainSpec:
    if path in REGISTRY:
        return build_example(path).spec()
    try:
        with open(path) as f:
            return DomainSpec.from_json(json.load(f))
    except FileNotFoundError:
        raise click.UsageError(f"spec file not found: {path}")
    except (json.JSONDecodeError, KeyError) as e:
        raise click.UsageError(f"malformed spec file {path}: {e}")


def _emit(report: Report, out: str | None):
    text = report.dumps()
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
    else:
        click.echo(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MAZU_THREADS", "1")))
    except ValueError:
        return 1


@click.group()
def main():
    """Grid lab for intrinsic-diameter distance and boundary connectivity."""


@main.command()
@click.option("--spec", "spec_path", required=True, help="spec JSON path or corpus name")
@click.option("--point", callback=_point, required=True, help='boundary point "x,y[,z]"')
@click.option("--r0", callback=_rational, default="0.4", help="coarsest ladder radius")
@click.option("--kmax", type=int, default=4, help="ladder depth: radii r0 * 2^-k")
@click.option("--h-den", callback=_rational, default=None,
              help="spacing policy denominator (h = r / den)")
@click.option("--json", "out", default=None, help="write the report here instead of stdout")
@click.option("--svg", "svg_out", default=None, help="render the coarsest ball to SVG")
def classify(spec_path, point, r0, kmax, h_den, out, svg_out):
    """Classify one boundary point: ladder, verdict, suite flags, audit."""
    sw = Stopwatch()
    spec = _load_spec(spec_path)
    den = h_den or (256 if spec.dim == 2 else 32)
    verdict = classify_point(spec, point, r0, kmax, h_policy=lambda r: r / den)
    sw.mark("classify")
    rep = Report(
        command="classify",
        parameters={"spec": spec_path, "point": list(point), "r0": r0, "kMax": kmax,
                    "hPolicy": f"r/{den:g}"},
        results=verdict.to_json(),
        spec_hash=spec.spec_hash(),
        timings=sw.marks,
    )
    if svg_out:
        from .svgrender import render_verdict

        with open(svg_out, "w") as f:
            f.write(render_verdict(verdict, verdict.ladder[0].raster))
    _emit(rep, out)
    sys.exit(1 if verdict.audit_violations else 0)


@main.command()
@click.option("--spec", "spec_path", required=True)
@click.option("--h", callback=_rational, required=True, help="cell spacing, e.g. 1/128")
@click.option("--from", "src", callback=_point, required=True)
@click.option("--to", "dst", callback=_point, required=True)
@click.option("--exact", is_flag=True, help="run the branch-and-bound search")
@click.option("--budget", type=int, default=200_000)
@click.option("--json", "out", default=None)
@click.option("--svg", "svg_out", default=None, help="render the witness path to SVG")
def dm(spec_path, h, src, dst, exact, budget, out, svg_out):
    """Certified interval for the intrinsic-diameter distance of two points."""
    sw = Stopwatch()
    spec = _load_spec(spec_path)
    raster = rasterize(spec, spec.window(), h)
    a = nearest_cell(raster, src)
    b = nearest_cell(raster, dst)
    bound = dm_bounds(raster, a, b)
    result = bound.to_json()
    if exact:
        from .errors import BudgetExceeded

        try:
            val, path = dm_exact(raster, a, b, budget)
            result["exact"] = val
            result["witnessPath"] = [int(c) for c in path]
        except BudgetExceeded as e:
            result["exact"] = None
            result["budgetExceededIncumbent"] = e.incumbent
    result["inner"] = inner_distance(raster, a, b)
    sw.mark("dm")
    rep = Report("dm", {"spec": spec_path, "h": h, "from": list(src), "to": list(dst),
                        "exact": exact, "budget": budget},
                 result, spec.spec_hash(), sw.marks)
    if svg_out:
        from .svgrender import render_path

        with open(svg_out, "w") as f:
            f.write(render_path(raster, bound.witness_path))
    _emit(rep, out)


@main.command()
@click.option("--spec", "spec_path", required=True)
@click.option("--eps", required=True, help="comma list of epsilon values")
@click.option("--h", "h_list", default=None, help="comma list of spacings (default two refinements)")
@click.option("--budget", type=int, default=4000)
@click.option("--json", "out", default=None)
def net(spec_path, eps, h_list, budget, out):
    """Total-boundedness profile: greedy net sizes per epsilon and spacing."""
    sw = Stopwatch()
    spec = _load_spec(spec_path)
    eps_vals = [float(Fraction(v)) for v in eps.split(",")]
    if h_list:
        hs = [float(Fraction(v)) for v in h_list.split(",")]
    else:
        hs = [1.0 / 256, 1.0 / 1024]
    profile = total_boundedness_profile(spec, eps_vals, hs, budget)
    sw.mark("net")
    _emit(Report("net", {"spec": spec_path, "eps": eps_vals, "h": hs, "budget": budget},
                 profile.to_json(), spec.spec_hash(), sw.marks), out)


@main.command()
@click.option("--spec", "spec_path", required=True)
@click.option("--point", callback=_point, required=True)
@click.option("--r0", callback=_rational, default="0.4")
@click.option("--kmax", type=int, default=4)
@click.option("--h-den", callback=_rational, default=None)
@click.option("--json", "out", default=None)
def fibers(spec_path, point, r0, kmax, h_den, out):
    """Completion-boundary fibers over a Euclidean boundary point."""
    sw = Stopwatch()
    spec = _load_spec(spec_path)
    den = h_den or (256 if spec.dim == 2 else 32)
    from .classifier import classify, refinement_pair

    ladder = scale_ladder(spec, point, r0, kmax, h_policy=lambda r: r / den)
    pair = refinement_pair(spec, point, ladder[-1].r, fine=ladder[-1])
    cls = classify(ladder, pair)
    rep_f = boundary_fibers(spec, point, ladder, cls)
    sw.mark("fibers")
    payload = rep_f.to_json()
    payload["classification"] = cls.to_json()
    _emit(Report("fibers", {"spec": spec_path, "point": list(point), "r0": r0,
                            "kMax": kmax, "hPolicy": f"r/{den:g}"},
                 payload, spec.spec_hash(), sw.marks), out)


@main.command()
@click.option("--suite", type=click.Choice(["janiszewski", "countable-union", "nested", "all"]),
              default="all")
@click.option("--count", type=int, default=200)
@click.option("--seed", type=int, default=7)
@click.option("--n", type=int, default=128, help="grid cells per unit (h = 1/n)")
@click.option("--json", "out", default=None)
def seplab(suite, count, seed, n, out):
    """Randomized hypothesis-satisfying instances of the separation facts."""
    sw = Stopwatch()
    cfg = SepLabConfig(n=n, seed=seed)
    suites = ["janiszewski", "countable-union", "nested"] if suite == "all" else [suite]
    results = [run_suite(s, count, cfg) for s in suites]
    sw.mark("seplab")
    bad = sum(r["tallies"]["COUNTEREXAMPLE"] for r in results)
    _emit(Report("seplab", {"suite": suite, "count": count, "seed": seed, "n": n},
                 results, None, sw.marks), out)
    sys.exit(1 if bad else 0)


@main.group()
def corpus():
    """The example-domain corpus."""


@corpus.command("list")
def corpus_list():
    for name in sorted(REGISTRY):
        entry = REGISTRY[name]
        pts = ", ".join(str(tuple(p.point)) for p in entry.probes)
        click.echo(f"{name:22s} dim={entry.spec().dim}  probes: {pts}")


@corpus.command("run")
@click.option("--only", default=None, help="comma list of entry names")
@click.option("--json", "out", default=None)
@click.option("--kmax", type=int, default=None)
def corpus_run(only, out, kmax):
    """Classify every probe point and compare against the recorded labels."""
    sw = Stopwatch()
    names = only.split(",") if only else None
    rep = run_corpus(names, k_max=kmax)
    sw.mark("corpus")
    _emit(Report("corpus run", {"only": only, "kMax": kmax}, rep, None, sw.marks), out)
    sys.exit(0 if rep["pass"] else 1)


@corpus.command("write-specs")
@click.argument("outdir", type=click.Path())
def corpus_write_specs(outdir):
    """Serialize every corpus domain to a spec JSON fixture."""
    os.makedirs(outdir, exist_ok=True)
    for name in sorted(REGISTRY):
        spec = build_example(name).spec()
        path = os.path.join(outdir, f"{name}.json")
        with open(path, "w") as f:
            json.dump(spec.to_json(), f, sort_keys=True, indent=2)
        click.echo(f"{spec.spec_hash()}  {path}")


@main.command()
@click.option("--spec", "spec_path", required=True)
@click.option("--h", callback=_rational, required=True)
@click.option("--out", "out", required=True, help="SVG output path")
def render(spec_path, h, out):
    """Render the rasterized domain to SVG."""
    from .svgrender import render_raster

    spec = _load_spec(spec_path)
    raster = rasterize(spec, spec.window(), h)
    with open(out, "w") as f:
        f.write(render_raster(raster))
    click.echo(f"wrote {out}")


def run():
    try:
        main()
    except MazulabError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    run()

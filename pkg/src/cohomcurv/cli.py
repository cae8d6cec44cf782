"""Command-line interface.

Exit codes: 0 when the check is positive (curvature homogeneous, smooth or
orbifold, roots as expected, catalog match, every reproduction row passing),
1 when it is negative, 2 for usage or input errors.  Reports are JSON with
sorted keys; sampled profiles may be written as CSV instead.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import curvature as cv
from .analytic import evaluate
from .classifier import (MATCH, MIXED_FAMILY, SYSTEM_IDS, classify_metric, compare_with_known, find_roots,
                         get_system, laurent_boundary, mixed_leading_k23, parse_box, run_sweep)
from .classifier.systems import UnknownSystem
from .connection import (curvature_from_connection, invariants_csv, invariant_rows, nabla_R_norm, nabla_ricci_norm,
                         product_frame_tensor, product_tensor, ricci_eigenvalues)
from .metrics import (CATALOG, CATALOG_IDS, ConfigError, DiagonalMetric, ProductMetric, UnknownId, catalog_get,
                      example5, metric_from_config, metric_to_config, random_metric, scaled_entry)
from .smoothness import Verdict, check_entry, check_smooth

COMMANDS = ("curvature", "check-ch", "check-smooth", "classify", "solve", "invariants", "catalog", "reproduce")
TOL_RANGE = (1e-14, 1e-2)
SAMPLES_RANGE = (10, 10**6)
EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- JSON helpers --------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


# -- reproduction pipeline ----------------------------------------------------------

@dataclass
class Row:
    key: str
    claim: str
    passed: bool
    detail: str = ""
    seconds: float | None = None  # wall clock; shown in the table, kept out of JSON so reports are reproducible

    def to_dict(self) -> dict:
        return {"key": self.key, "claim": self.claim, "passed": self.passed, "detail": self.detail}


@dataclass
class ReproduceOptions:
    samples: int = cv.CH_SAMPLES
    tol: float = cv.CH_TOL
    seed: int = 0
    system: str | None = None
    box: str | None = None
    mutation: str | None = None
    sweep_draws: int = 10_000
    oracle_random: int = 20
    oracle_samples: int = 50


MUTATIONS = ("mixed-sign",)


def _closed_form(mutation: str | None) -> Callable:
    if mutation is None:
        return cv.curvature_components
    if mutation == "mixed-sign":
        def flipped(m, t):
            cd = cv.curvature_components(m, t)
            return cv.CurvatureData(cd.kappa, tuple(-x for x in cd.mixed), cd.radial)
        return flipped
    raise UsageError(f"unknown mutation {mutation!r}; known: {', '.join(MUTATIONS)}")


def _oracle_gap(m, closed: Callable, n: int) -> float:
    lo, hi = cv.sample_interval(m)
    ts = np.linspace(lo, hi, n)
    if isinstance(m, ProductMetric):
        return max(float(np.max(np.abs(product_frame_tensor(m, t) - product_tensor(m, t)))) for t in ts)
    return max(float(np.max(np.abs(curvature_from_connection(m, t).as_vector() - closed(m, t).as_vector())))
               for t in ts)


def perturbed(m, i: int, factor: float = 1.01):
    """Metric with one length multiplied by ``factor``; for products ``i`` picks ``f`` or ``g``."""
    if isinstance(m, ProductMetric):
        return ProductMetric(m.f * factor, m.g, m.domain) if i == 0 else ProductMetric(m.f, m.g * factor, m.domain)
    fs = [1.0, 1.0, 1.0]
    fs[i] = factor
    return m.multiplied(fs)


def collapsing_indices(m) -> list[int]:
    """Indices of the lengths vanishing at the left end (for products the only ones a perturbation may touch)."""
    lo = m.domain[0]
    return [i for i, f in enumerate(m.functions) if abs(float(evaluate(f, lo))) <= 1e-12]


def reproduce(opts: ReproduceOptions | None = None) -> list[Row]:
    opts = opts or ReproduceOptions()
    rows: list[Row] = []

    def add(key, claim, fn):
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a failing row, never an abort
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append(Row(key, claim, bool(passed), detail, time.perf_counter() - start))

    for id in CATALOG_IDS:
        def ch(id=id):
            r = cv.is_curvature_homogeneous(CATALOG[id].metric, opts.samples, opts.tol)
            return r.verdict and r.max_deviation < 1e-9, f"deviation {r.max_deviation:.2e}"
        add(f"ch:{id}", "catalog entry is curvature homogeneous", ch)

    for id in CATALOG_IDS:
        def smooth(id=id):
            reps = check_entry(CATALOG[id])
            return all(r.verdict is Verdict.SMOOTH for r in reps), ", ".join(f"{r.end}={r.verdict.value}" for r in reps)
        add(f"smooth:{id}", "catalog entry is smooth at every listed end", smooth)

    def orbifold():
        r = check_smooth(example5(3.0))
        return r.verdict is Verdict.ORBIFOLD, f"{r.verdict.value} order {r.orbifold_order}"
    add("smooth:ex5-b3", "scaled Example 5 with b = 3 is an orbifold", orbifold)

    def perturbations():
        bad = []
        for id in CATALOG_IDS:
            e = CATALOG[id]
            idx = collapsing_indices(e.metric) if isinstance(e.metric, ProductMetric) else range(3)
            for i in idx:
                r = check_smooth(perturbed(e.metric, i), e.diagrams[0], "lo")
                if r.verdict is not Verdict.NOT_SMOOTH:
                    bad.append(f"{id}[{i}]={r.verdict.value}")
        return not bad, "all NOT_SMOOTH" if not bad else ", ".join(bad)
    add("smooth:perturbed", "1.01 perturbations are not smooth", perturbations)

    for sid in SYSTEM_IDS:
        system = get_system(sid)

        def residual(system=system):
            if not system.known_roots:
                return True, "no known roots"
            worst = max(system.known_residual(k) for k in system.known_roots)
            return worst <= 1e-12, f"max residual {worst:.1e}"
        add(f"residual:{sid}", "known roots solve the printed system", residual)

    start = time.perf_counter()
    for sid in SYSTEM_IDS:
        def roots(sid=sid):
            system = get_system(sid)
            box = parse_box(opts.box, system.params, system.box) if (opts.box and opts.system == sid) else None
            report = find_roots(system, box=box)
            cmp = compare_with_known(report, system)
            ok = not cmp["missing"] and not cmp["extra"]
            detail = f"found {_fmt_points(report.points)}"
            if cmp["missing"]:
                detail += f"; missing {_fmt_points(cmp['missing'])}"
            if cmp["extra"]:
                detail += f"; extra {_fmt_points(cmp['extra'])}"
            return ok, detail
        add(f"roots:{sid}", "root set equals the published solution set", roots)
    roots_time = time.perf_counter() - start
    rows.append(Row("roots:runtime", "root enumeration under 30 s", roots_time < 30.0, "limit 30 s", roots_time))

    def oracle():
        closed = _closed_form(opts.mutation)
        rng = np.random.default_rng(opts.seed)
        metrics = [CATALOG[id].metric for id in CATALOG_IDS]
        metrics += [random_metric(rng) for _ in range(opts.oracle_random)]
        gap = max(_oracle_gap(m, closed, opts.oracle_samples) for m in metrics)
        return gap < 1e-8, f"sup difference {gap:.2e}"
    add("oracle:equivalence", "connection route equals the closed-form components", oracle)

    def tsukada():
        m = CATALOG["tsukada"].metric
        cd = cv.curvature_components(m, 0.7)
        ric = np.sort(ricci_eigenvalues(m, 0.7))
        nr = nabla_R_norm(m, 0.7)
        a, b = nabla_ricci_norm(m, 0.3), nabla_ricci_norm(m, 1.5)
        ok = (abs(cd.kappa[2] - cd.kappa[0] - 4) < 1e-9 and np.allclose(ric, [-3, -3, 1, 1], atol=1e-9)
              and nr > 1e-2 and abs(a - b) > 0.1 * max(a, b))
        return ok, f"k23-k12={cd.kappa[2] - cd.kappa[0]:.6g}, Ric={np.round(ric, 9).tolist()}, |nabla R|={nr:.4g}, |nabla Ric|(0.3)={a:.4g}, (1.5)={b:.4g}"
    add("tsukada:discriminators", "Tsukada metric is not Einstein and not locally symmetric", tsukada)

    def symmetric():
        worst = 0.0
        for id in CATALOG_IDS:
            if id == "tsukada":
                continue
            m = CATALOG[id].metric
            worst = max(worst, max(nabla_R_norm(m, t) for t in np.linspace(*cv.sample_interval(m), 5)))
        return worst < 1e-8, f"max |nabla R| {worst:.1e}"
    add("symmetric:nabla-R", "every other catalog entry is locally symmetric", symmetric)

    def sweep():
        r = run_sweep(opts.sweep_draws, opts.seed, tol=opts.tol)
        return r.ch_count == 0 and r.seconds < 60, f"{r.ch_count} CH of {r.draws}, min deviation {r.min_deviation:.3g}"
    add("sweep:regular-orbits", "no CH metric when every orbit is principal", sweep)

    def laurent():
        rng = np.random.default_rng(opts.seed)
        worst = 0.0
        for _ in range(20):
            a1, a2, b2, d2, a3, b3, d3 = rng.uniform(0.2, 2.0, 7)
            L = laurent_boundary(MIXED_FAMILY, (a1, a2, b2, d2, a3, b3, d3))
            worst = max(worst, abs(L.coefficient(-2) - mixed_leading_k23(a1, b2, a3, b3)))
        a1, a2, d2, a3, b3, d3 = rng.uniform(0.2, 2.0, 6)
        tied = abs(laurent_boundary(MIXED_FAMILY, (a1, a2, a3 + b3, d2, a3, b3, d3)).coefficient(-2))
        return worst <= 1e-8 and tied <= 1e-8, f"max error {worst:.1e}, tied stratum {tied:.1e}"
    add("laurent:mixed-family", "leading pole of k23 matches the closed form", laurent)
    return rows


def _fmt_points(points) -> str:
    return "[" + ", ".join("(" + ", ".join(f"{x:.6g}" for x in p) + ")" for p in points) + "]"


def format_table(rows: Sequence[Row]) -> str:
    width = max(len(r.key) for r in rows)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.key:<{width}}  {r.claim}  [{r.detail}"
             + (f", {r.seconds:.2f} s]" if r.seconds is not None else "]") for r in rows]
    n = sum(r.passed for r in rows)
    lines.append(f"{n}/{len(rows)} rows pass")
    return "\n".join(lines) + "\n"


# -- argument handling ---------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--catalog", metavar="ID", help="catalog id, e.g. tsukada or ex5")
    src.add_argument("--config", metavar="PATH", help="JSON metric config")
    p.add_argument("--tol", type=float, default=cv.CH_TOL)
    p.add_argument("--samples", type=int, default=cv.CH_SAMPLES)
    p.add_argument("--order", type=int, default=10, help="series order for smoothness checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--scale", type=float, help="multiply the metric functions (family parameter for families)")
    p.add_argument("--system", metavar="ID", help="constraint system id")
    p.add_argument("--box", metavar="OVERRIDES", help="box overrides, e.g. b=0.1:1.5,c=0:4")
    p.add_argument("--end", choices=("lo", "hi"), help="domain end for check-smooth on a config")
    p.add_argument("--mutate", choices=MUTATIONS, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohomcurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "curvature": "sampled frame curvature components",
        "check-ch": "curvature homogeneity check",
        "check-smooth": "smoothness at singular orbits",
        "classify": "match against the catalog",
        "solve": "enumerate roots of a constraint system",
        "invariants": "sampled |nabla Ric|, |nabla R| and Ricci eigenvalues",
        "catalog": "list the catalog",
        "reproduce": "run the full reproduction pipeline",
    }
    for name in COMMANDS:
        _common(sub.add_parser(name, help=helps[name]))
    return parser


def _validate(args) -> None:
    if not TOL_RANGE[0] <= args.tol <= TOL_RANGE[1]:
        raise UsageError(f"--tol must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")
    if not SAMPLES_RANGE[0] <= args.samples <= SAMPLES_RANGE[1]:
        raise UsageError(f"--samples must lie in [{SAMPLES_RANGE[0]}, {SAMPLES_RANGE[1]}]")
    if args.scale is not None and not (args.scale > 0 and math.isfinite(args.scale)):
        raise UsageError("--scale must be a positive number")
    if not 2 <= args.order <= 40:
        raise UsageError("--order must lie in [2, 40]")


def _load(args):
    """Metric, catalog entry (or None) and a label."""
    if args.catalog:
        entry = catalog_get(args.catalog)
        m = scaled_entry(entry.id, args.scale) if args.scale is not None else entry.metric
        return m, entry, entry.id
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        m = metric_from_config(raw)
        if args.scale is not None:
            m = m.multiplied((args.scale,) * 3) if isinstance(m, DiagonalMetric) else ProductMetric(m.f, m.g * args.scale, m.domain)
        return m, None, args.config
    raise UsageError("one of --catalog or --config is required")


def _sample_points(m, n: int) -> np.ndarray:
    return np.linspace(*cv.sample_interval(m), n)


def _cmd_curvature(args):
    m, _, label = _load(args)
    ts = _sample_points(m, args.samples)
    if isinstance(m, ProductMetric):
        if args.format == "csv":
            raise UsageError("CSV profiles are available for diagonal metrics only")
        pc = cv.curvature_components_product(m, ts)
        comps = dict(zip(("sec12", "sec_iT", "sec_i4", "sec_T4"), pc.as_vector()))
        return EXIT_OK, {"metric": label, "t": ts, "components": comps}
    if args.format == "csv":
        return EXIT_OK, cv.profile_csv(m, ts)
    cd = cv.curvature_components(m, ts)
    return EXIT_OK, {"metric": label, "t": ts, "components": dict(zip(cv.CurvatureData.NAMES, cd.as_vector()))}


def _cmd_check_ch(args):
    m, _, label = _load(args)
    r = cv.is_curvature_homogeneous(m, args.samples, args.tol)
    report = {"metric": label, "curvature_homogeneous": r.verdict, "max_deviation": r.max_deviation,
              "interval": r.interval, "worst_component": r.worst_component, "samples": args.samples, "tol": args.tol}
    return (EXIT_OK if r.verdict else EXIT_NEGATIVE), report


def _cmd_check_smooth(args):
    m, entry, label = _load(args)
    if entry is not None and args.end is None:
        reps = [check_smooth(m, d, end, args.order) for d, end in zip(entry.diagrams, ("lo", "hi"))]
    else:
        diagram = entry.diagrams[0 if args.end != "hi" else -1] if entry is not None else None
        reps = [check_smooth(m, diagram, args.end or "lo", args.order)]
    ok = all(r.ok for r in reps)
    return (EXIT_OK if ok else EXIT_NEGATIVE), {"metric": label, "ends": [r.to_dict() for r in reps]}


def _cmd_classify(args):
    m, _, label = _load(args)
    c = classify_metric(m, args.samples, args.tol)
    return (EXIT_OK if c.outcome == MATCH else EXIT_NEGATIVE), {"metric": label, **c.to_dict()}


def _cmd_solve(args):
    if not args.system:
        raise UsageError("solve needs --system")
    system = get_system(args.system)
    box = parse_box(args.box, system.params, system.box) if args.box else None
    report = find_roots(system, box=box)
    cmp = compare_with_known(report, system)
    ok = not cmp["missing"] and not cmp["extra"]
    out = report.to_dict()
    out.update({"known_roots": [list(k.values) for k in system.known_roots],
                "missing": cmp["missing"], "extra": cmp["extra"], "matches_known": ok})
    return (EXIT_OK if ok else EXIT_NEGATIVE), out


def _cmd_invariants(args):
    m, _, label = _load(args)
    ts = _sample_points(m, args.samples)
    if args.format == "csv":
        return EXIT_OK, invariants_csv(m, ts)
    rows = invariant_rows(m, ts)
    cols = ("t", "nabla_ric", "nabla_R", "ric")
    return EXIT_OK, {"metric": label, "rows": [dict(zip(cols, (r[0], r[1], r[2], list(r[3:])))) for r in rows]}


def _cmd_catalog(args):
    out = []
    for id in CATALOG_IDS:
        e = CATALOG[id]
        out.append({"id": id, "manifold": e.manifold, "homogeneous": e.homogeneous, "einstein": e.einstein,
                    "family": e.family, "metric": metric_to_config(e.metric),
                    "diagrams": [d.to_dict() for d in e.diagrams]})
    return EXIT_OK, {"entries": out}


def _cmd_reproduce(args):
    if args.system and args.system not in SYSTEM_IDS:
        raise UnknownSystem(args.system)
    opts = ReproduceOptions(samples=args.samples, tol=args.tol, seed=args.seed, system=args.system,
                            box=args.box, mutation=args.mutate)
    rows = reproduce(opts)
    ok = all(r.passed for r in rows)
    if args.format == "csv" or args.out is None:
        return (EXIT_OK if ok else EXIT_NEGATIVE), format_table(rows)
    return (EXIT_OK if ok else EXIT_NEGATIVE), {"rows": [r.to_dict() for r in rows], "all_pass": ok}


HANDLERS = {
    "curvature": _cmd_curvature, "check-ch": _cmd_check_ch, "check-smooth": _cmd_check_smooth,
    "classify": _cmd_classify, "solve": _cmd_solve, "invariants": _cmd_invariants,
    "catalog": _cmd_catalog, "reproduce": _cmd_reproduce,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        _validate(args)
        code, report = HANDLERS[args.command](args)
    except (UsageError, ConfigError, UnknownId, UnknownSystem, ValueError, cv.DomainError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"cohomcurv {args.command}: error: {msg}", file=stderr)
        return EXIT_USAGE
    text = report if isinstance(report, str) else dumps(report)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cohomcurv {args.command}: error: cannot write output: {exc}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())

"""Command-line front end.

Subcommands:

``check``      validate a model, print hypothesis flags, drift class,
               branch points, and (with ``--gluing``) the gluing report.
``prob``       compute hitting probabilities by one or more methods over
               single points or sweep ranges; CSV or JSON output.
``sweep``      alias of ``prob`` (ranges are accepted by both).
``compare``    run several methods and check their pairwise agreement
               against a tolerance.
``constants``  print the asymptotic constants applicable to the model.

Models come from ``--preset NAME [--params a,b,...]`` or ``--model FILE``
(walk-spec JSON).  Floating output uses 17 significant digits so runs are
diffable; ``--no-timings`` zeroes the runtime column for byte-identical
output of deterministic methods.  ``QHP_THREADS`` caps the sweep worker
pool.  Exit codes: 0 success, 1 numerical failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import asymptotics as asym
from . import gluing as gl
from . import integral as ig
from . import kernel as kn
from . import montecarlo as mc
from . import oracle as oc
from . import walk as wk
from .errors import (ClassError, DomainError, NoExplicitGluing,
                     NonConvergence, PoleError, PoleOnPath, QhpError,
                     ValidationError)

METHODS = ("dp", "integral", "asymptotic", "continuum", "mc")
CSV_HEADER = "i0,j0,method,value,err_lo,err_hi,status,runtime_ms"


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return "%.17g" % x


@dataclass
class Row:
    i0: int
    j0: int
    method: str
    value: float
    err_lo: float
    err_hi: float
    status: str
    runtime_ms: float
    detail: str = ""          # diagnostics shown with --verbose, never in CSV

    def csv(self, timings: bool) -> str:
        ms = self.runtime_ms if timings else 0.0
        return ",".join([str(self.i0), str(self.j0), self.method,
                         _fmt(self.value), _fmt(self.err_lo), _fmt(self.err_hi),
                         self.status, "%.3f" % ms])

    def as_dict(self, timings: bool) -> dict:
        return {"i0": self.i0, "j0": self.j0, "method": self.method,
                "value": self.value, "err_lo": self.err_lo,
                "err_hi": self.err_hi, "status": self.status,
                "runtime_ms": self.runtime_ms if timings else 0.0}


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_model_args(sub):
    sub.add_argument("--preset", choices=wk.PRESET_NAMES,
                     help="named walk family")
    sub.add_argument("--params", default="",
                     help="comma-separated preset parameters")
    sub.add_argument("--model", help="walk-spec JSON file")


def _load_model(args) -> wk.StepDistribution:
    if args.model and args.preset:
        raise ValidationError("give either --model or --preset, not both")
    if args.model:
        return wk.load_walk(args.model)
    if args.preset:
        params = [float(v) for v in args.params.split(",") if v != ""]
        return wk.preset(args.preset, params)
    raise ValidationError("a model is required: --preset NAME or --model FILE")


def _parse_range(spec: str) -> list[int]:
    """``'7'`` -> [7]; ``'40:160:40'`` -> [40, 80, 120, 160] (end inclusive)."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) == 2:
        parts.append("1")
    lo, hi, step = (int(v) for v in parts)
    if step <= 0 or hi < lo:
        raise ValidationError(f"bad range {spec!r}: need lo:hi:stride with stride > 0")
    return list(range(lo, hi + 1, step))


def _parse_grid(spec: str) -> tuple[int, int]:
    if "x" in spec:
        a, b = spec.split("x", 1)
        return int(a), int(b)
    n = int(spec)
    return n, n


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qhp",
        description="Hitting probabilities of quarter-plane random walks "
                    "(vertical axis before horizontal axis).")
    sub = ap.add_subparsers(dest="command", required=True)

    chk = sub.add_parser("check", help="validate a model and report its structure")
    _add_model_args(chk)
    chk.add_argument("--gluing", action="store_true",
                     help="include pole data and the gluing identity report")
    chk.add_argument("--json", action="store_true",
                     help="dump the full report (polynomials, roots) as JSON")
    chk.set_defaults(func=cmd_check)

    for name in ("prob", "sweep"):
        pr = sub.add_parser(name, help="compute hitting probabilities")
        _add_model_args(pr)
        pr.add_argument("--i0", required=True, help="start column, INT or lo:hi:stride")
        pr.add_argument("--j0", required=True, help="start row, INT or lo:hi:stride")
        pr.add_argument("--method", default="dp",
                        help=f"comma list from {','.join(METHODS)}")
        pr.add_argument("--grid", default="400", help="dp truncation NX or NXxNY")
        pr.add_argument("--nodes", type=int, default=256, help="quadrature nodes")
        pr.add_argument("--paths", type=int, default=100_000, help="mc paths")
        pr.add_argument("--seed", type=int, default=0, help="mc master seed")
        pr.add_argument("--max-steps", type=int, default=1_000_000,
                        help="mc censoring horizon")
        pr.add_argument("--workers", type=int, default=1, help="mc worker streams")
        pr.add_argument("--output", help="write rows to this file")
        pr.add_argument("--format", choices=("csv", "json"), default="csv")
        pr.add_argument("--no-timings", action="store_true",
                        help="zero the runtime column (diffable output)")
        pr.add_argument("--verbose", action="store_true")
        pr.set_defaults(func=cmd_prob)

    cp = sub.add_parser("compare", help="cross-check methods against each other")
    _add_model_args(cp)
    cp.add_argument("--i0", required=True)
    cp.add_argument("--j0", required=True)
    cp.add_argument("--method", required=True, help="two or more methods")
    cp.add_argument("--tol", type=float, help="absolute tolerance")
    cp.add_argument("--rel-tol", type=float, help="relative tolerance")
    cp.add_argument("--grid", default="400")
    cp.add_argument("--nodes", type=int, default=256)
    cp.add_argument("--paths", type=int, default=100_000)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--max-steps", type=int, default=1_000_000)
    cp.add_argument("--workers", type=int, default=1)
    cp.set_defaults(func=cmd_compare)

    co = sub.add_parser("constants", help="print asymptotic constants")
    _add_model_args(co)
    co.add_argument("--j0", type=int, default=1,
                    help="j0 for the geometric-regime prefactor")
    co.set_defaults(func=cmd_constants)
    return ap


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    p = _load_model(args)
    report = wk.validate(p)
    klass = wk.classify(p)
    d = wk.drift(p)
    out = {
        "assumptions": {"h1": report.h1, "h2": report.h2, "h3": report.h3,
                        "h4": report.h4, "h2prime": report.h2prime,
                        "messages": list(report.messages)},
        "drift": {"mx": d.mx, "my": d.my},
        "class": klass.tag.value,
    }
    try:
        bp = kn.branch_points(p)
        out["branch_points"] = {"x": list(bp.x), "y": list(bp.y)}
        alg = kn.algebra(p)
        out["kernel"] = {"a": list(alg.a), "b": list(alg.b), "c": list(alg.c),
                         "at": list(alg.at), "bt": list(alg.bt), "ct": list(alg.ct),
                         "d": list(alg.d), "dt": list(alg.dt)}
    except QhpError as exc:
        out["branch_points"] = {"error": str(exc)}
    if klass.tag is wk.Regime.ZERO_ZERO:
        out["theta"] = kn.theta(p)
        out["beta"] = kn.beta_ratio(p)
    try:
        g = gl.build_gluing(p)
        ginfo = {"kind": g.kind.value, "pole": g.pole, "pole_order": g.pole_order}
        if g.pole_at_x2 is not None:
            ginfo["pole_at_x2"] = g.pole_at_x2
        if args.gluing:
            rep = gl.verify_gluing(g, p, 64)
            ginfo["verify"] = {"max_mismatch": rep.max_mismatch,
                               "worst_y": rep.worst_y,
                               "n_samples": rep.n_samples}
        out["gluing"] = ginfo
    except NoExplicitGluing as exc:
        out["gluing"] = {"kind": "NoExplicitGluing", "detail": str(exc)}

    if args.json:
        print(json.dumps(out, indent=2))
        return 0

    flags = out["assumptions"]
    print("assumptions: " + "  ".join(
        f"{k}={'ok' if flags[k] else 'FAIL'}" for k in ("h1", "h2", "h3", "h4"))
        + f"  h2prime={'yes' if flags['h2prime'] else 'no'}")
    for msg in flags["messages"]:
        print(f"  note: {msg}")
    print(f"drift: ({_fmt(d.mx)}, {_fmt(d.my)})")
    print(f"class: {out['class']}")
    if "x" in out.get("branch_points", {}):
        xs = ", ".join(_fmt(v) if math.isfinite(v) else "inf"
                       for v in out["branch_points"]["x"])
        print(f"branch points x: ({xs})")
    else:
        print(f"branch points: {out['branch_points'].get('error')}")
    if "theta" in out:
        print(f"theta: {_fmt(out['theta'])}   beta: {_fmt(out['beta'])}")
    gi = out["gluing"]
    print(f"gluing: {gi['kind']}", end="")
    if "pole_at_x2" in gi:
        print(f"  pole_at_x2={_fmt(gi['pole_at_x2'])}", end="")
    print()
    if "verify" in gi:
        v = gi["verify"]
        print(f"gluing identity: max mismatch {_fmt(v['max_mismatch'])} "
              f"at y={_fmt(v['worst_y'])} ({v['n_samples']} samples)")
    return 0


# ---------------------------------------------------------------------------
# prob / sweep / compare
# ---------------------------------------------------------------------------

def _method_runner(p, args):
    """Prepare shared state and return a Row factory for one point."""
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r}; choose from {METHODS}")
    i0s = _parse_range(args.i0)
    j0s = _parse_range(args.j0)
    if not i0s or not j0s:
        raise ValidationError("empty sweep ranges")
    grid = _parse_grid(args.grid)

    shared: dict = {}
    if "dp" in methods:
        nx, ny = grid
        hi_i, hi_j = max(i0s), max(j0s)
        if hi_i >= nx or hi_j >= ny:
            raise ValidationError(
                f"grid {nx}x{ny} too small for sweep up to ({hi_i},{hi_j})")
        shared["dp"] = oc.solve_bracket(p, nx, ny, 1e-10)
    if "integral" in methods or "asymptotic" in methods:
        try:
            shared["gluing"] = gl.build_gluing(p)
        except NoExplicitGluing as exc:
            shared["gluing_error"] = str(exc)
    cfg = ig.QuadratureConfig(nodes=max(16, args.nodes))

    def run(point) -> Row:
        i0, j0, method = point
        t0 = time.perf_counter()
        value = err_lo = err_hi = float("nan")
        status = "ok"
        detail = ""
        try:
            if method == "dp":
                lo, hi = shared["dp"].bracket(i0, j0)
                value, err_lo, err_hi = 0.5 * (lo + hi), lo, hi
            elif method == "integral":
                if "gluing" not in shared:
                    raise NoExplicitGluing(shared["gluing_error"])
                r = ig.hit_probability(p, i0, j0, shared["gluing"], cfg)
                value = float(r.value)
                err_lo, err_hi = value - r.err_estimate, value + r.err_estimate
                detail = " ".join(f"{k}={v}" for k, v in sorted(
                    r.diagnostics.items(), key=lambda kv: kv[0]))
            elif method == "asymptotic":
                value = asym.asymptotic_probability(p, i0, j0)
                err_lo = err_hi = value
            elif method == "continuum":
                value = asym.continuum_probability(p, float(i0), float(j0))
                err_lo = err_hi = value
            elif method == "mc":
                row_seed = int(np.random.SeedSequence(
                    entropy=args.seed, spawn_key=(i0, j0)).generate_state(1)[0])
                est = mc.simulate(p, i0, j0, args.paths, row_seed,
                                  args.max_steps, args.workers)
                value = est.point
                err_lo = min(est.ci95[0], est.bracket[0])
                err_hi = max(est.ci95[1], est.bracket[1])
                detail = (f"hits_v={est.hits_v} hits_h={est.hits_h} "
                          f"censored={est.censored} seed={row_seed}")
        except NoExplicitGluing:
            status = "NoExplicitGluing"
        except ClassError:
            status = "unsupported-class"
        except (DomainError, PoleOnPath, PoleError) as exc:
            status = f"error:{type(exc).__name__}"
        ms = 1000.0 * (time.perf_counter() - t0)
        return Row(i0, j0, method, value, err_lo, err_hi, status, ms, detail)

    points = [(i0, j0, m) for i0 in i0s for j0 in j0s for m in methods]
    return points, run


def _pool_size(n_tasks: int) -> int:
    cap = os.environ.get("QHP_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, n_tasks))


def _run_points(points, run) -> list[Row]:
    with ThreadPoolExecutor(max_workers=_pool_size(len(points))) as pool:
        rows = list(pool.map(run, points))
    rows.sort(key=lambda r: (r.i0, r.j0, r.method))
    return rows


def cmd_prob(args) -> int:
    p = _load_model(args)
    points, run = _method_runner(p, args)
    rows = _run_points(points, run)
    timings = not args.no_timings
    if args.format == "csv":
        text = "\n".join([CSV_HEADER] + [r.csv(timings) for r in rows]) + "\n"
    else:
        text = json.dumps([r.as_dict(timings) for r in rows], indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        if args.verbose:
            print(f"wrote {len(rows)} rows to {args.output}")
    else:
        sys.stdout.write(text)
    if args.verbose:
        for r in rows:
            if r.detail:
                print(f"# ({r.i0},{r.j0}) {r.method}: {r.detail}", file=sys.stderr)
    return 1 if any(r.status.startswith("error:") for r in rows) else 0


def cmd_compare(args) -> int:
    if args.tol is None and args.rel_tol is None:
        raise ValidationError("compare needs --tol or --rel-tol")
    p = _load_model(args)
    args.no_timings = True
    points, run = _method_runner(p, args)
    methods = sorted({m for _, _, m in points})
    if len(methods) < 2:
        raise ValidationError("compare needs at least two methods")
    rows = _run_points(points, run)
    by_point: dict[tuple[int, int], list[Row]] = {}
    for r in rows:
        by_point.setdefault((r.i0, r.j0), []).append(r)
    all_ok = True
    for (i0, j0), group in sorted(by_point.items()):
        usable = [r for r in group if r.status == "ok"]
        skipped = [r for r in group if r.status != "ok"]
        if len(usable) < 2:
            print(f"({i0},{j0}): skipped ({', '.join(r.method + ':' + r.status for r in skipped)})")
            continue
        vals = [r.value for r in usable]
        spread = max(vals) - min(vals)
        tol = args.tol if args.tol is not None else 0.0
        if args.rel_tol is not None:
            tol = max(tol, args.rel_tol * max(abs(v) for v in vals))
        ok = spread <= tol
        all_ok = all_ok and ok
        tag = "pass" if ok else "FAIL"
        print(f"({i0},{j0}): max discrepancy {_fmt(spread)} tol {_fmt(tol)} "
              f"[{', '.join(r.method for r in usable)}] {tag}")
    return 0 if all_ok else 1


def cmd_constants(args) -> int:
    p = _load_model(args)
    tag = wk.classify(p).tag
    print(f"class: {tag.value}")

    def line(name, fn):
        try:
            print(f"{name} = {_fmt(fn())}")
        except (ClassError, DomainError, NoExplicitGluing, NonConvergence) as exc:
            print(f"{name}: n/a ({type(exc).__name__}: {exc})")

    line("theta", lambda: kn.theta(p))
    line("beta", lambda: kn.beta_ratio(p))
    line("A", lambda: asym.constant_A(p))
    line("D", lambda: asym.constant_D(p))
    line("rho", lambda: asym.rho(p))
    line(f"B({args.j0})", lambda: asym.constant_B(p, args.j0))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, PoleOnPath, PoleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: evaluate the laws to CSV, sample paths, and run
the validation suite.

An occupation budget c != 1 is accepted everywhere and routed through the
scaling reduction: results for (y, c) are computed at (y / sqrt(c), 1)
and rescaled (times by c, space by sqrt(c)).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .bridge_laws import BridgeSpec, first_hit_density, q_closed, q_integral
from .errors import (DomainError, NonConvergence, OutOfRange,
                     RejectionBudgetExceeded)
from .limit_laws import (StartSpec, g_cdf, g_tail_point, gamma_cdf,
                         reduce_to_unit_budget)
from .samplers import (RngStream, last_zero, occupation_below_zero,
                       sample_conditioned_bm, sample_X)
from .validation import reports_to_json, run_suite

GRID_POINTS = 400
# consecutive grid points differ by 2**0.05; 400 points span ~20 octaves and
# the grid hits every quarter-power of two exactly (e.g. 0.25 when the top is 1)
_LOG2_SPAN = 0.05 * (GRID_POINTS - 1)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _log_grid(hi: float) -> np.ndarray:
    top = math.log2(hi)
    return np.exp2(np.linspace(top - _LOG2_SPAN, top, GRID_POINTS))


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("BARRIER_OCC_SEED")
    return int(env) if env else 0


def _write_csv(out, header: str, rows, fmt: str = "csv") -> None:
    if fmt == "json":
        keys = header.split(",")
        payload = [dict(zip(keys, (float(_fmt(v)) for v in row)))
                   for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = header + "\n" + "\n".join(",".join(_fmt(v) for v in row)
                                         for row in rows) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return None
    return value


def _cmd_cdf_g(args) -> int:
    y_eff, c = reduce_to_unit_budget(StartSpec(args.y, args.c))
    hi = args.x if args.x is not None else c * g_tail_point(y_eff)
    grid = np.geomspace(c * 2.0 ** -10, hi, GRID_POINTS)
    rows = [(x, g_cdf(y_eff, x / c)) for x in grid]
    _write_csv(args.out, "x,cdf", rows, args.format)
    return 0


def _cmd_cdf_gamma(args) -> int:
    y_eff, c = reduce_to_unit_budget(StartSpec(args.y, args.c))
    grid = _log_grid(c)
    rows = [(u, gamma_cdf(y_eff, u / c)) for u in grid]
    _write_csv(args.out, "u,cdf", rows, args.format)
    return 0


def _cmd_q(args) -> int:
    y_eff, c = reduce_to_unit_budget(StartSpec(args.y, args.c))
    quad = q_integral(y_eff, args.t / c, args.u / c)
    closed = q_closed(y_eff, args.t / c, args.u / c)
    sys.stdout.write(f"quadrature={_fmt(quad)}\n")
    sys.stdout.write(f"closed_form={_fmt(closed)}\n")
    sys.stdout.write(f"difference={_fmt(abs(quad - closed))}\n")
    return 0


def _cmd_tau_density(args) -> int:
    y_eff, c = reduce_to_unit_budget(StartSpec(args.y, args.c))
    spec = BridgeSpec(y=y_eff, t=args.t / c, z=0.0)
    s_grid = np.linspace(0.0, args.t, GRID_POINTS + 2)[1:-1]
    dens = first_hit_density(spec, s_grid / c) / c
    _write_csv(args.out, "s,density", zip(s_grid, dens), args.format)
    return 0


def _path_files(out: str, n: int):
    if n == 1:
        return [out]
    stem, ext = os.path.splitext(out)
    return [f"{stem}_{i:03d}{ext}" for i in range(n)]


def _cmd_sample_x(args) -> int:
    if not args.out:
        raise DomainError("sample-x requires --out")
    y_eff, c = reduce_to_unit_budget(StartSpec(args.y, args.c))
    seed = _resolve_seed(args.seed)
    files = _path_files(args.out, args.n)
    meta = []
    for i in range(args.n):
        path, g, tau, gamma = sample_X(y_eff, args.T / c, args.step / c,
                                       RngStream(seed, i))
        times = c * path.times
        values = math.sqrt(c) * path.values
        _write_csv(files[i], "t,value", zip(times, values))
        meta.append({"g": c * g, "tau": _json_safe(c * tau),
                     "gamma": c * gamma, "seed": seed, "stream_id": i})
    sidecar = args.out + ".json"
    with open(sidecar, "w") as fh:
        json.dump(meta[0] if args.n == 1 else meta, fh, indent=2,
                  sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_sample_cbm(args) -> int:
    if not args.out:
        raise DomainError("sample-cbm requires --out")
    y_eff, c = reduce_to_unit_budget(StartSpec(args.y, args.c))
    seed = _resolve_seed(args.seed)
    files = _path_files(args.out, args.n)
    meta = []
    for i in range(args.n):
        path = sample_conditioned_bm(y_eff, args.T / c, args.step / c, 1.0,
                                     RngStream(seed, i))
        g_t = c * last_zero(path, path.duration)
        occ = c * occupation_below_zero(path, path.duration)
        times = c * path.times
        values = math.sqrt(c) * path.values
        _write_csv(files[i], "t,value", zip(times, values))
        meta.append({"g_T": g_t, "Gamma_T": occ, "n_rejected": path.n_rejected,
                     "seed": seed, "stream_id": i})
    with open(args.out + ".json", "w") as fh:
        json.dump(meta[0] if args.n == 1 else meta, fh, indent=2,
                  sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_figure1(args) -> int:
    rows = []
    for y in (-2.0, -1.0, 0.0, 1.0, 2.0):
        for x in np.geomspace(2.0 ** -10, 8.0, GRID_POINTS):
            rows.append(("g", y, x, g_cdf(y, x)))
        for u in _log_grid(1.0):
            rows.append(("gamma", y, u, gamma_cdf(y, u)))
    text = "law,y,x,cdf\n" + "\n".join(
        f"{law},{_fmt(y)},{_fmt(x)},{_fmt(v)}" for law, y, x, v in rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args) -> int:
    seed = _resolve_seed(args.seed)
    reports = run_suite(seed, profile=args.profile)
    text = reports_to_json(reports, deterministic=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failures = [r for r in reports if not r.passed]
    for r in failures:
        sys.stderr.write(f"FAILED {r.name}: statistic {r.statistic:.6g} "
                         f"> tolerance {r.tolerance:.6g}\n")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barrier-occ",
        description="Laws and samplers for Brownian motion restricted to "
                    "spend at most one (budget-c) time unit below a barrier.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, y=True, seed=False, out=True):
        if y:
            p.add_argument("--y", type=float, required=True,
                           help="starting point (space units)")
        p.add_argument("--c", type=float, default=1.0,
                       help="occupation budget in time units (default 1)")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="seed (falls back to BARRIER_OCC_SEED, then 0)")
        if out:
            p.add_argument("--out", type=str, default=None,
                           help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("cdf-g", help="CDF of the last zero")
    common(p)
    p.add_argument("--x", type=float, default=None,
                   help="upper grid end (default: the 1e-4 tail point)")
    p.set_defaults(func=_cmd_cdf_g)

    p = sub.add_parser("cdf-gamma", help="CDF of the occupation time")
    common(p)
    p.set_defaults(func=_cmd_cdf_gamma)

    p = sub.add_parser("q", help="bridge occupation probability, both formulas")
    common(p, out=False)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.set_defaults(func=_cmd_q)

    p = sub.add_parser("tau-density", help="first-zero density of the bridge")
    common(p)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=_cmd_tau_density)

    p = sub.add_parser("sample-x", help="sample the limiting process")
    common(p, seed=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--T", type=float, default=4.0, help="horizon")
    p.add_argument("--step", type=float, default=2.0 ** -8)
    p.set_defaults(func=_cmd_sample_x)

    p = sub.add_parser("sample-cbm",
                       help="sample the occupation-conditioned Brownian motion")
    common(p, seed=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--T", type=float, default=50.0, help="horizon")
    p.add_argument("--step", type=float, default=2.0 ** -8)
    p.set_defaults(func=_cmd_sample_cbm)

    p = sub.add_parser("figure1", help="CDF curves for y in {-2,-1,0,1,2}")
    common(p, y=False, out=True)
    p.set_defaults(func=_cmd_figure1)

    p = sub.add_parser("validate", help="run the validation suite")
    common(p, y=False, seed=True)
    p.add_argument("--profile", choices=("full", "quick"), default="full")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, OutOfRange) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (NonConvergence, RejectionBudgetExceeded) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: every subcommand emits one table as CSV or JSON."""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__, crossover, cumulants_ldf, exact_laws, monte_carlo, spectral
from .params import ResetParams, parse_probability

FORMATS = ("csv", "json")
DEFAULT_SEED = 20240601


@dataclass
class TableArtifact:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row of length {len(row)} does not match {len(self.columns)} columns")


class CommandError(Exception):
    """Invalid request; reported on stderr with a nonzero exit status."""


# -- emission --------------------------------------------------------------------


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def _json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render(table: TableArtifact, fmt: str) -> str:
    if fmt == "json":
        doc = {"meta": _json_value(table.meta), "columns": list(table.columns), "rows": _json_value(table.rows)}
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    if fmt != "csv":
        raise CommandError(f"unknown format {fmt!r}")
    out = io.StringIO()
    for key, value in table.meta.items():
        out.write(f"# {key}: {json.dumps(_json_value(value), sort_keys=True)}\n")
    out.write(",".join(table.columns) + "\n")
    for row in table.rows:
        out.write(",".join(_csv_cell(v) for v in row) + "\n")
    return out.getvalue()


def emit(table: TableArtifact, fmt: str, path: str | None) -> None:
    text = render(table, fmt)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- argument helpers ------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _grid(text: str) -> list[float]:
    """``a,b,c`` (explicit values) or ``min:max:points``."""
    if ":" in text:
        try:
            lo, hi, n = text.split(":")
            return list(np.linspace(float(lo), float(hi), int(n)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected min:max:points, got {text!r}") from exc
    return _float_list(text)


def _params(args) -> ResetParams:
    text = args.r
    if getattr(args, "exact", False):
        try:
            return ResetParams(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise CommandError(f"--r {text!r} is not a rational number") from exc
    return ResetParams(float(parse_probability(text)))


def _linspace(lo: float, hi: float, n: int) -> list[float]:
    if n < 1:
        raise CommandError("--points must be positive")
    if not 0 < lo <= hi < 1:
        raise CommandError("the r grid must satisfy 0 < r-min <= r-max < 1")
    return [float(v) for v in np.linspace(lo, hi, n)]


def _r_values(args) -> list[float]:
    if getattr(args, "r_grid", None) is not None:
        values = [float(v) for v in args.r_grid]
        if not all(0 < v < 1 for v in values):
            raise CommandError("every value of --r-grid must lie in (0, 1)")
        return values
    return _linspace(args.r_min, args.r_max, args.points)


# -- subcommands -----------------------------------------------------------------


def cmd_amplitudes(args) -> TableArtifact:
    rows = []
    for r in _r_values(args):
        A, A_cross = spectral.amplitudes(r)
        rows.append([r, r, A_cross, A])
    r_star, a_max = spectral.max_cross_amplitude()
    return TableArtifact(["r", "A_dot", "A_cross", "A"], rows, {"A_cross_max": a_max, "r_at_A_cross_max": r_star})


def cmd_decay(args) -> TableArtifact:
    rows = [[r, spectral.amplitudes(r).A_cross, spectral.decay_rate(r)] for r in _r_values(args)]
    r_star, s_max = spectral.max_decay_rate()
    return TableArtifact(["r", "A_cross", "sigma"], rows, {"sigma_max": s_max, "r_at_sigma_max": r_star})


def cmd_dist(args) -> TableArtifact:
    params = _params(args)
    field_ = exact_laws.EXACT if args.exact else exact_laws.FLOAT
    try:
        law = exact_laws.joint_law(params, args.t, field_)
    except exact_laws.BudgetError as exc:
        raise CommandError(str(exc)) from exc
    cell = str if args.exact else float
    rows = [[k] + [cell(v) for v in row] for k, row in enumerate(law.probs)]
    columns = ["k_cross"] + [f"m_dot={m}" for m in range(args.t + 1)]
    return TableArtifact(columns, rows, {"r": str(params.r), "t": args.t, "field": field_, "total": str(law.total())})


def cmd_dressed(args) -> TableArtifact:
    params = _params(args)
    field_ = exact_laws.EXACT if args.exact else exact_laws.FLOAT
    law = exact_laws.dressed_law(params, args.tau_max, field_)
    cell = str if args.exact else float
    rows = [[tau, cell(p), cell(s)] for tau, (p, s) in enumerate(zip(law.pmf, law.survival))]
    meta = {"r": str(params.r), "mean_return_time": law.mean_return, "sigma": spectral.decay_rate(params)}
    return TableArtifact(["tau", "rho_r", "R_r"], rows, meta)


def cmd_cumulants(args) -> TableArtifact:
    params = _params(args)
    table = cumulants_ldf.cumulant_amplitudes(params, args.order)
    rows = [[k, l, k + l, v] for (k, l), v in sorted(table.c.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0]))]
    meta = {"r": str(params.r), "order": args.order, "C": {str(n): v for n, v in table.C.items()}}
    return TableArtifact(["k", "l", "n", "c_kl"], rows, meta)


def _curve(r: float, which: str, points: int) -> list[tuple[float, float]]:
    grid = sorted(set(float(x) for x in cumulants_ldf.univariate_grid(which, points)) | {cumulants_ldf.mean_density(r, which)})
    return [(x, cumulants_ldf.legendre_univariate(r, which, x).I) for x in grid]


def cmd_ldf(args) -> TableArtifact:
    params = _params(args)
    r = float(params.r)
    which = ["dot", "cross", "sum"] if args.which == "all" else [args.which]
    names = {"dot": ("eta", "I_dot"), "cross": ("xi", "I_cross"), "sum": ("phi", "I_sum")}
    curves = {w: _curve(r, w, args.points) for w in which}
    n = max(len(c) for c in curves.values())
    columns, rows = [], [[] for _ in range(n)]
    meta = {"r": r}
    for w in which:
        columns.extend(names[w])
        for i in range(n):
            rows[i].extend(curves[w][i] if i < len(curves[w]) else ("", ""))
        x_min, I_min = min(curves[w], key=lambda p: p[1])
        meta[f"{names[w][0]}_0"] = x_min
        meta[f"{names[w][1]}_min"] = I_min
    I_A, I_B, I_C = cumulants_ldf.boundary_values(r)
    meta.update({"I_A": I_A, "I_B": I_B, "I_C": I_C, "sigma": spectral.decay_rate(r)})
    return TableArtifact(columns, rows, meta)


def _density(zeta: float, u: float) -> float:
    if u == 0:
        return float(crossover.density_small_u(zeta, 0.0))
    if u < crossover.U_RANGE[0]:
        return float(crossover.density_small_u(zeta, u))
    if u > crossover.U_RANGE[1]:
        return float(crossover.density_large_u(zeta, u))
    return crossover.crossover_density(zeta, u)


def cmd_crossover(args) -> TableArtifact:
    us = args.u
    if any(u < 0 for u in us):
        raise CommandError("--u values must be nonnegative")
    if not 0 < args.zeta_max <= crossover.ZETA_RANGE[1]:
        raise CommandError(f"--zeta-max must lie in (0, {crossover.ZETA_RANGE[1]}]")
    zetas = np.linspace(0.0, args.zeta_max, args.points)
    cols = {u: [_density(float(z), u) for z in zetas] for u in us}
    rows = [[float(z)] + [cols[u][i] for u in us] for i, z in enumerate(zetas)]
    peaks = {f"u={u:g}": max(cols[u]) for u in us}
    return TableArtifact(["zeta"] + [f"f(u={u:g})" for u in us], rows, {"peak": peaks, "peak_limit": crossover.INV_SQRT_PI})


def cmd_moments(args) -> TableArtifact:
    if any(u <= 0 for u in args.u):
        raise CommandError("--u values must be positive")
    k = args.kmax
    rows = []
    for u in args.u:
        ms = crossover.cumulants_gamma(u, k)
        rows.append([u, *ms.mu, *ms.gamma, crossover.occupancy_scaling(u)])
    columns = ["u"] + [f"mu_{i}" for i in range(1, k + 1)] + [f"gamma_{i}" for i in range(1, k + 1)] + ["G"]
    return TableArtifact(columns, rows)


def cmd_simulate(args) -> TableArtifact:
    params = _params(args)
    stats = monte_carlo.batch_stats(params, args.t, args.paths, args.seed, workers=args.workers)
    r = float(params.r)
    rows = []
    theory = {}
    if 0 < r < 1:
        A, A_cross = spectral.amplitudes(r)
        theory = {"cross": A_cross * args.t, "dot": r * args.t, "total": A * args.t}
    elif r == 0:
        theory = {"dot": 0.0}
    for name in ("cross", "dot", "total"):
        est = stats.estimate(name)
        rows.append([name, est.mean, est.stderr, theory.get(name, "")])
    meta = {"r": r, "t": args.t, "paths": args.paths, "seed": args.seed}
    return TableArtifact(["quantity", "mean", "stderr", "asymptotic"], rows, meta)


def cmd_stationary(args) -> TableArtifact:
    params = _params(args)
    r = float(params.r)
    t_burn = args.t_burn if args.t_burn is not None else monte_carlo.burn_in(params)
    freq = monte_carlo.stationary_histogram(params, t_burn, args.samples, args.seed, workers=args.workers)
    law = spectral.stationary_law(r)
    xmax = max(abs(x) for x in freq)
    rows = [[x, freq.get(x, 0.0), float(law.pmf(x))] for x in range(-xmax, xmax + 1)]
    meta = {"r": r, "t_burn": t_burn, "samples": args.samples, "seed": args.seed, "amplitude": law.amplitude, "ratio": law.ratio}
    return TableArtifact(["x", "empirical", "exact"], rows, meta)


COMMANDS = {
    "amplitudes": cmd_amplitudes,
    "decay": cmd_decay,
    "dist": cmd_dist,
    "dressed": cmd_dressed,
    "cumulants": cmd_cumulants,
    "ldf": cmd_ldf,
    "crossover": cmd_crossover,
    "moments": cmd_moments,
    "simulate": cmd_simulate,
    "stationary": cmd_stationary,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="output format (env POLYA_FORMAT, default csv)")
    common.add_argument("--output", default=None, help="output path (default: standard output)")
    common.add_argument("--seed", type=int, default=None, help="master seed (env POLYA_SEED)")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="exact", action="store_true", help="rational arithmetic where supported")
    mode.add_argument("--float", dest="exact", action="store_false", help="double precision (default)")
    common.set_defaults(exact=False)

    parser = argparse.ArgumentParser(prog="polyareset", description="Returns and resets of the reset random walk.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def r_grid(p):
        p.add_argument("--r-min", type=float, default=0.001)
        p.add_argument("--r-max", type=float, default=0.999)
        p.add_argument("--points", type=int, default=200)
        p.add_argument("--r-grid", type=_grid, default=None, help="explicit values a,b,c or min:max:points")

    p = sub.add_parser("amplitudes", parents=[common], help="A_dot, A_cross and A against r")
    r_grid(p)
    p = sub.add_parser("decay", parents=[common], help="A_cross and the decay rate sigma against r")
    r_grid(p)
    p = sub.add_parser("dist", parents=[common], help="joint law of crosses and dots at time t")
    p.add_argument("--r", required=True)
    p.add_argument("--t", type=int, required=True)
    p = sub.add_parser("dressed", parents=[common], help="law of the time between spontaneous returns")
    p.add_argument("--r", required=True)
    p.add_argument("--tau-max", type=int, default=200)
    p = sub.add_parser("cumulants", parents=[common], help="cumulant amplitudes c_kl from the series of S")
    p.add_argument("--r", required=True)
    p.add_argument("--order", type=int, default=6)
    p = sub.add_parser("ldf", parents=[common], help="univariate large-deviation functions")
    p.add_argument("--r", default="0.3")
    p.add_argument("--which", choices=["all", "dot", "cross", "sum"], default="all")
    p.add_argument("--points", type=int, default=cumulants_ldf.CURVE_POINTS)
    p = sub.add_parser("crossover", parents=[common], help="crossover density f(zeta, u)")
    p.add_argument("--u", type=_float_list, default=[0.0, 0.5, 1.0, 2.0, 4.0])
    p.add_argument("--zeta-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=400)
    p = sub.add_parser("moments", parents=[common], help="moments, cumulants and G(u) of the crossover law")
    p.add_argument("--u", type=_float_list, default=[0.5, 1.0, 2.0, 4.0, 8.0])
    p.add_argument("--kmax", type=int, default=6)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimates of the counts")
    p.add_argument("--r", required=True)
    p.add_argument("--t", type=int, default=1000)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("stationary", parents=[common], help="empirical stationary position law")
    p.add_argument("--r", required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--t-burn", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _apply_environment(args) -> None:
    if args.format is None:
        args.format = os.environ.get("POLYA_FORMAT", "csv")
        if args.format not in FORMATS:
            raise CommandError(f"POLYA_FORMAT must be one of {FORMATS}, got {args.format!r}")
    if args.seed is None:
        env = os.environ.get("POLYA_SEED")
        try:
            args.seed = int(env) if env is not None else DEFAULT_SEED
        except ValueError as exc:
            raise CommandError(f"POLYA_SEED must be an integer, got {env!r}") from exc


def dispatch(args) -> TableArtifact:
    _apply_environment(args)
    return COMMANDS[args.command](args)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        table = dispatch(args)
        emit(table, args.format, args.output)
    except (CommandError, ValueError, ArithmeticError, OSError) as exc:
        print(f"polyareset {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

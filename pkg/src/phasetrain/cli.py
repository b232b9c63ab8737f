"""``phasetrain`` command line: curve tables, tau optimization, Monte Carlo
checks, coding experiments, the pedagogical processes and the self-test.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 self-test failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__, acceptance, analytic, coding, montecarlo, oracle, svg
from .errors import (
    BoundViolation,
    NonDifferentiablePoint,
    PhaseTrainError,
    UnsupportedSurface,
)
from .models import (
    Oscillation,
    Repetition,
    SimConfig,
    StationaryIid,
    UnboundedSpike,
    XorRandomChannel,
    check_tau,
    model_name,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_SELFTEST = 0, 1, 2, 3

ANALYZE_HEADER = ["eps", "h_data", "h_diag", "hprime_data", "hprime_diag"]
OPTIMIZE_HEADER = ["a", "tau_opt", "r_opt", "i_at_opt", "tau_ref"]
SIMULATE_HEADER = ["t", "exact", "estimate", "ci_low", "ci_high"]
CODE_HEADER = ["R", "trials", "errors", "pe", "capacity_estimate"]
EXAMPLES_HEADER = ["t", "entropy"]

EXAMPLE_MODELS = {1: "iid", 2: "repetition", 3: "oscillation", 4: "spike"}
# paths name where output goes, not what was computed; keeping them out of
# the manifest lets reruns into different directories compare byte for byte
_NOT_PARAMETERS = {"out", "json", "svg", "func", "command"}


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- formatting and output -------------------------------------------------


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".12g")


def _clean(value):
    """Recursively convert numpy scalars/arrays and non-finite floats for JSON."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (
        _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
        if epoch
        else _dt.datetime.now(tz=_dt.timezone.utc)
    )
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def manifest(args: argparse.Namespace) -> Dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_PARAMETERS}
    return {
        "command": args.command,
        "parameters": _clean(params),
        "seed": int(args.seed),
        "tool_version": __version__,
        "timestamp": timestamp(),
    }


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_csv(path: Optional[str], header: Sequence[str], rows, man: Dict) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    with open(path + ".manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dump_json(man))


def write_summary(path: Optional[str], summary: Dict, man: Dict) -> None:
    if not path:
        return
    base = {k: None for k in ("model", "tau", "a", "mutual_info", "lower_bound_rate", "tau_opt", "r_opt")}
    base.update(summary)
    base["manifest"] = man
    text = _dump_json(base)
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_svg(path: Optional[str], fig: svg.Figure, man: Dict, **kw) -> None:
    if path:
        text = svg.render(fig, **kw)
        meta = "<metadata>" + svg.escape(json.dumps(_clean(man), sort_keys=True)) + "</metadata>\n"
        head, rest = text.split("\n", 1)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(head + "\n" + meta + rest)


# -- argument parsing helpers ----------------------------------------------


def parse_number(token: str) -> float:
    """Float, or a ratio ``p/q`` whose parts may be the constant ``e``."""
    token = token.strip()

    def atom(s):
        s = s.strip()
        if s == "e":
            return math.e
        return float(s)

    try:
        if "/" in token:
            num, den = token.split("/", 1)
            return atom(num) / atom(den)
        return atom(token)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {token!r}") from None


def parse_list(text: str) -> List[float]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return [parse_number(t) for t in items]


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:n`` into ``n`` evenly spaced points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must look like lo:hi:n")
    lo, hi = parse_number(parts[0]), parse_number(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError("grid size must be an integer") from None
    if n < 1 or (n > 1 and not hi > lo):
        raise argparse.ArgumentTypeError("grid needs n >= 1 and lo < hi")
    return np.linspace(lo, hi, n)


def _model_from_args(args):
    name = args.model
    if name == "xor":
        return XorRandomChannel(args.a)
    if name == "iid":
        return StationaryIid(args.h)
    if name == "repetition":
        return Repetition()
    if name == "oscillation":
        return Oscillation()
    if name == "spike":
        return UnboundedSpike()
    raise UsageError(f"unknown model {name!r}")


# -- commands ---------------------------------------------------------------


def cmd_analyze(args) -> int:
    man = manifest(args)
    model = _model_from_args(args)
    tau = check_tau(args.tau)
    F = analytic.entropy_surface(model)
    grid = args.eps if args.eps is not None else np.linspace(-0.5, 1.0 / tau - 1.0, 101)
    curves = analytic.tabulate_curves(F, tau, grid)
    rows = zip(curves.eps_grid, curves.h_data, curves.h_diag, curves.hprime_data, curves.hprime_diag)
    write_csv(args.out, ANALYZE_HEADER, rows, man)

    limits = analytic.phase_limits(F, tau) if tau < 1.0 else None
    summary = {
        "model": model_name(model),
        "tau": tau,
        "a": getattr(model, "a", None),
        "mutual_info": curves.mutual_info,
        "lower_bound_rate": (1.0 - tau) * curves.mutual_info,
        "hprime_data_limit": limits.hprime_data if limits else None,
        "hprime_diag_limit": limits.hprime_diag if limits else None,
        "gap": limits.gap if limits else None,
    }
    if isinstance(model, XorRandomChannel):
        opt = analytic.optimize_tau(model)
        summary.update(tau_opt=opt.tau_opt, r_opt=opt.r_opt)
    write_summary(args.json, summary, man)

    fig = svg.Figure(f"{model_name(model)} entropy curves, tau={tau:g}", "eps", "bits per training symbol")
    fig.add("H(Y_eps|X)", curves.eps_grid, curves.h_data)
    fig.add("H(Y_eps|X_eps)", curves.eps_grid, curves.h_diag, dashed=True)
    fig.add("H'(data)", curves.eps_grid, curves.hprime_data)
    fig.add("H'(diag)", curves.eps_grid, curves.hprime_diag, dashed=True)
    fig.vlines.append((0.0, "data phase"))
    fig.vlines.extend((k, "kink") for k in F.kinks if k != 0.0)
    fig.notes.append(f"gap I = {curves.mutual_info:.6f}")
    write_svg(args.svg, fig, man)
    return EXIT_OK


def cmd_optimize(args) -> int:
    man = manifest(args)
    if any(not a > 0 for a in args.a_list):
        raise UsageError("all a must be positive")
    rows = []
    for a in args.a_list:
        try:
            res = analytic.optimize_tau(XorRandomChannel(a), tol=args.tol)
        except ArithmeticError as exc:
            raise NumericalFailure(f"optimizer failed at a={a!r}: {exc}") from exc
        rows.append((a, res.tau_opt, res.r_opt, res.i_at_opt, analytic.asymptotic_tau_reference(a)))
    write_csv(args.out, OPTIMIZE_HEADER, rows, man)
    cols = list(zip(*rows))
    write_summary(
        args.json,
        {
            "model": "xor",
            "a": list(cols[0]),
            "tau_opt": list(cols[1]),
            "r_opt": list(cols[2]),
            "mutual_info": list(cols[3]),
            "lower_bound_rate": list(cols[2]),
            "tau_ref": list(cols[4]),
        },
        man,
    )
    x = [math.log10(a) for a in cols[0]]
    fig = svg.Figure("optimal training fraction", "log10 a", "value")
    fig.add("tau_opt", x, cols[1], points=True)
    fig.add("R_opt", x, cols[2], points=True)
    ref = [np.nan if r is None else r for r in cols[4]]
    fig.add("asymptotic tau", x, ref, dashed=True, points=True)
    write_svg(args.svg, fig, man)
    return EXIT_OK


def calibration_ok(est: montecarlo.Estimate, exact: float) -> bool:
    """Deviation within twice the reported interval, floored at the
    rule-of-three resolution 3/trials for zero-variance samples."""
    allowance = 2.0 * max(est.ci_half_width, 3.0 / est.trials)
    return abs(est.mean - exact) <= allowance + 1e-12


def cmd_simulate(args) -> int:
    man = manifest(args)
    cfg = SimConfig(args.T, args.tau, args.a, args.trials, args.seed)
    exact_cfg = oracle.XorExactConfig(cfg.T, cfg.B, cfg.L)
    top = min(cfg.T, cfg.B - 1)
    lo = 1 if args.quantity == "distinct" else 0
    ts = sorted({int(round(v)) for v in np.linspace(lo, max(top, lo), args.points)})
    rows = []
    for t in ts:
        if args.quantity == "unseen":
            exact = oracle.xor_unseen_probability(t, cfg.L)
            est = montecarlo.estimate_unseen_probability(cfg, t)
        elif args.quantity == "distinct":
            exact = oracle.xor_block_entropy(oracle.XorExactConfig(t, cfg.B, cfg.L))
            est = montecarlo.estimate_distinct_channels(cfg, t)
        else:
            exact = 1.0 - oracle.xor_unseen_probability(t, cfg.L)
            est = montecarlo.estimate_data_phase_mi(cfg, training=t)
        rows.append((t, exact, est))
    write_csv(args.out, SIMULATE_HEADER, [(t, x, e.mean, e.ci_low, e.ci_high) for t, x, e in rows], man)

    mi = oracle.xor_finite_mutual_information(exact_cfg)
    opt = analytic.optimize_tau(XorRandomChannel(args.a))
    write_summary(
        args.json,
        {
            "model": "xor",
            "tau": cfg.tau,
            "a": cfg.a,
            "T": cfg.T,
            "B": cfg.B,
            "L": cfg.L,
            "quantity": args.quantity,
            "mutual_info": mi,
            "lower_bound_rate": (1.0 - cfg.tau) * mi,
            "tau_opt": opt.tau_opt,
            "r_opt": opt.r_opt,
            "calibrated": all(calibration_ok(e, x) for _, x, e in rows),
        },
        man,
    )
    fig = svg.Figure(f"{args.quantity}: exact vs Monte Carlo (T={cfg.T}, L={cfg.L})", "t", args.quantity)
    fig.add("exact", ts, [x for _, x, _ in rows])
    fig.add("estimate", ts, [e.mean for _, _, e in rows], points=True, dashed=True)
    fig.add("3-sigma low", ts, [e.ci_low for _, _, e in rows], dashed=True)
    fig.add("3-sigma high", ts, [e.ci_high for _, _, e in rows], dashed=True)
    write_svg(args.svg, fig, man)

    bad = [t for t, x, e in rows if not calibration_ok(e, x)]
    if bad:
        print(f"error: estimates disagree with the exact values at t={bad}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_code(args) -> int:
    man = manifest(args)
    tau = check_tau(args.tau)
    results = coding.rate_sweep(args.B, tau, args.a, args.blocks, args.rate_list, args.trials, args.seed)
    rows = [(r.rate, r.trials, r.errors, r.empirical_pe, r.capacity_estimate) for r in results]
    write_csv(args.out, CODE_HEADER, rows, man)
    mi = analytic.xor_mutual_information(args.a, tau)
    opt = analytic.optimize_tau(XorRandomChannel(args.a))
    bound = (1.0 - tau) * mi
    write_summary(
        args.json,
        {
            "model": "xor",
            "tau": tau,
            "a": args.a,
            "mutual_info": mi,
            "lower_bound_rate": bound,
            "tau_opt": opt.tau_opt,
            "r_opt": opt.r_opt,
            "rate": [r.rate for r in results],
            "pe": [r.empirical_pe for r in results],
            "capacity_estimate": results[0].capacity_estimate if results else None,
        },
        man,
    )
    fig = svg.Figure(f"random linear codes, B={args.B}, tau={tau:g}, n={args.blocks}", "R (bits per transmission)", "block error rate")
    fig.add("empirical pe", [r.rate for r in results], [r.empirical_pe for r in results], points=True)
    fig.vlines.append((bound, "(1-tau) I"))
    write_svg(args.svg, fig, man, ylim=(-0.05, 1.05))
    return EXIT_OK


def _example_model(which: int, h: float):
    return {1: StationaryIid(h), 2: Repetition(), 3: Oscillation(), 4: UnboundedSpike()}[which]


def cmd_examples(args) -> int:
    man = manifest(args)
    model = _example_model(args.which, args.h)
    tau = check_tau(args.tau)
    T = args.T
    entropies = oracle.pedagogical_entropies(model, T, 2 * T)
    write_csv(args.out, EXAMPLES_HEADER, entropies, man)

    F = analytic.entropy_surface(model)
    grid = np.round(np.arange(-0.9, 1.0 + 1e-9, 0.1), 10)
    surface = [F(tau, float(e)) for e in grid]
    residual = [analytic.integral_consistency(F, tau, float(e), model) for e in grid]
    averaged = analytic.averaged_h_prime(entropies, T, args.avg_eps, args.kappa)
    if isinstance(model, Oscillation):
        status, limit = "does not exist", None
    else:
        status = "exists"
        limit = [oracle.limit_per_symbol_entropy(model, float(e)) for e in grid]
        if isinstance(model, UnboundedSpike):
            status = "exists except for an unbounded impulse"
    mi = analytic.one_shot_mutual_information(F, tau) if tau < 1.0 else 0.0
    write_summary(
        args.json,
        {
            "model": model_name(model),
            "example": args.which,
            "tau": tau,
            "T": T,
            "mutual_info": mi,
            "lower_bound_rate": (1.0 - tau) * mi,
            "eps_grid": grid,
            "h_surface": surface,
            "hprime_status": status,
            "hprime_limit": limit,
            "averaged_hprime": averaged,
            "averaged_hprime_window": {"eps": args.avg_eps, "kappa": args.kappa},
            "integral_residual": residual,
            "max_integral_residual": max(residual),
            "residual_at_0": analytic.integral_consistency(F, tau, 0.0, model),
        },
        man,
    )
    fig = svg.Figure(f"example {args.which}: per-symbol entropy", "t", "H(y_t+1 | y^t)")
    t, h = zip(*entropies)
    fig.add(model_name(model), t, h)
    write_svg(args.svg, fig, man)
    return EXIT_OK


def cmd_selftest(args) -> int:
    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",") if x.strip()]
            acceptance.select(only)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    outcomes = acceptance.run(only)
    failed = [o for o in outcomes if not o.passed]
    if args.json:
        report = {
            "passed": not failed,
            "failed": [o.number for o in failed],
            "criteria": [
                {
                    "number": o.number,
                    "title": o.title,
                    "passed": o.passed,
                    "detail": o.detail,
                    "elapsed_s": round(o.elapsed_s, 3),
                    "budget_s": o.budget_s,
                }
                for o in outcomes
            ],
            "tool_version": __version__,
        }
        sys.stdout.write(_dump_json(report))
    else:
        for o in outcomes:
            print(o.line())
        if failed:
            print("failed criteria: " + ", ".join(str(o.number) for o in failed))
    return EXIT_SELFTEST if failed else EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="CSV output path (default stdout)")
    common.add_argument("--json", metavar="PATH", help="write a JSON summary here ('-' for stdout)")
    common.add_argument("--svg", metavar="PATH", help="write an SVG plot here")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")

    parser = _Parser(prog="phasetrain", description="Entropy phase transitions and one-shot training.")
    parser.add_argument("--version", action="version", version=f"phasetrain {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="tabulate entropy curves and their derivatives")
    p.add_argument("--model", choices=["xor", "iid", "repetition", "oscillation", "spike"], default="xor")
    p.add_argument("--a", type=parse_number, default=1.0, help="XOR channel density")
    p.add_argument("--h", type=parse_number, default=1.0, help="entropy rate of the iid process")
    p.add_argument("--tau", type=parse_number, default=0.5)
    p.add_argument("--eps", type=parse_grid, help="lo:hi:n (default -0.5:1/tau-1:101)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", parents=[common], help="optimal training fraction for the XOR model")
    p.add_argument("--a-list", type=parse_list, default=parse_list("0.001,0.01,0.1,1/e,1,10,100,1000"))
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", parents=[common], help="exact oracle vs Monte Carlo")
    p.add_argument("--T", type=int, default=2)
    p.add_argument("--tau", type=parse_number, default=0.5)
    p.add_argument("--a", type=parse_number, default=1.0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--quantity", choices=["unseen", "distinct", "mi"], default="unseen")
    p.add_argument("--points", type=int, default=11, help="number of t grid points")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("code", parents=[common], help="random linear codes over the trained erasure channel")
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--tau", type=parse_number, default=0.443)
    p.add_argument("--a", type=parse_number, default=1.0)
    p.add_argument("--rate-list", type=parse_list, default=parse_list("0.16,0.24"))
    p.add_argument("--blocks", type=int, default=20)
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("examples", parents=[common], help="the four pedagogical processes")
    p.add_argument("--which", type=int, choices=sorted(EXAMPLE_MODELS), required=True)
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--tau", type=parse_number, default=0.5)
    p.add_argument("--h", type=parse_number, default=1.0, help="entropy rate for example 1")
    p.add_argument("--avg-eps", type=float, default=0.5, help="centre of the averaging window")
    p.add_argument("--kappa", type=float, default=0.1, help="relative width of the averaging window")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, UnsupportedSurface, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, ArithmeticError, NonDifferentiablePoint, BoundViolation, PhaseTrainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

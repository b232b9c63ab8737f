"""Acceptance criteria shared by the test suite and ``phasetrain selftest``.

Each check returns ``(passed, detail)``; :func:`run` adds timing against the
criterion's runtime budget. Tolerances are pinned here and nowhere else.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from . import analytic, coding, montecarlo, oracle
from .models import (
    Oscillation,
    Repetition,
    SimConfig,
    UnboundedSpike,
    XorRandomChannel,
)

Check = Callable[[], Tuple[bool, str]]


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    budget_s: float
    check: Check


@dataclass(frozen=True)
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    elapsed_s: float
    budget_s: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.title} ({self.elapsed_s:.2f}s / {self.budget_s:g}s): {self.detail}"


def _tau_opt_inverse_e():
    a = 1.0 / math.e
    res = analytic.optimize_tau(XorRandomChannel(a))
    d_tau = abs(res.tau_opt - 1.0 / math.e)
    d_rate = abs(res.r_opt - (1.0 - 1.0 / math.e) ** 2)
    ok = d_tau <= 1e-6 and d_rate <= 1e-9
    return ok, f"tau_opt={res.tau_opt:.10f} (err {d_tau:.1e} <= 1e-6), r_opt={res.r_opt:.12f} (err {d_rate:.1e} <= 1e-9)"


def _tau_opt_regimes():
    t1 = analytic.optimize_tau(XorRandomChannel(1.0)).tau_opt
    t_big = analytic.optimize_tau(XorRandomChannel(1000.0)).tau_opt
    t_small = analytic.optimize_tau(XorRandomChannel(0.001)).tau_opt
    ratio = t_small / (-0.001 * math.log(0.001))
    ok = 0.43 <= t1 <= 0.45 and abs(t_big - 0.5) <= 0.01 and abs(ratio - 1.0) <= 0.05
    return ok, f"tau_opt(1)={t1:.5f} in [0.43,0.45], |tau_opt(1000)-0.5|={abs(t_big - 0.5):.2e} <= 0.01, small-a ratio={ratio:.5f} (|r-1| <= 0.05)"


def _one_shot_grid():
    worst = 0.0
    for a in (0.1, 1.0 / math.e, 1.0, 10.0):
        F = analytic.entropy_surface(XorRandomChannel(a))
        for tau in np.round(np.arange(0.1, 0.95, 0.1), 10):
            got = analytic.one_shot_mutual_information(F, float(tau))
            worst = max(worst, abs(got + math.expm1(-tau / a)))
    return worst <= 1e-6, f"max |I - (1 - e^(-tau/a))| = {worst:.2e} <= 1e-6 over 36 grid points"


def xor_piecewise(a: float, tau: float, eps: float, delta: float) -> float:
    """Reference H(Y_eps | X_delta) for the XOR model, written out by branch."""
    if eps <= delta:
        return (a / tau) * -math.expm1(-(tau / a) * (1.0 + eps))
    return (a / tau) * -math.expm1(-(tau / a) * (1.0 + delta)) + (eps - delta)


def _scaling_vs_piecewise(n: int = 1000, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a = float(10.0 ** rng.uniform(-1.0, 1.0))
        tau = float(rng.uniform(0.05, 1.0))
        hi = 1.0 / tau - 1.0
        eps, delta = (float(v) for v in rng.uniform(-0.999, hi, size=2))
        F = analytic.entropy_surface(XorRandomChannel(a))
        got = analytic.scale_surface(F, tau, eps, delta).value
        ref = xor_piecewise(a, tau, eps, delta)
        worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    return worst <= 1e-12, f"max scaled error {worst:.2e} <= 1e-12 over {n} random (tau, eps, delta, a)"


def _oracle_equivalence():
    mismatches = 0
    cases = 0
    for L in range(1, 5):
        for T in range(0, 7):
            cfg = oracle.XorExactConfig(T, max(T, 1), L)
            cases += 1
            if oracle.xor_block_entropy(cfg, exact=True) != oracle.xor_block_entropy_bruteforce(cfg):
                mismatches += 1
    worst = 0.0
    for T in range(1, 1001):
        cfg = oracle.XorExactConfig.from_params(T, 0.5, 1.0)
        chain = math.fsum(oracle.xor_conditional_entropy(t, cfg, "diagonal") for t in range(T))
        worst = max(worst, abs(chain - oracle.xor_block_entropy(cfg)))
    ok = mismatches == 0 and worst <= 1e-12
    return ok, f"{cases - mismatches}/{cases} exact matches (T<=6, L<=4); chain-rule max error {worst:.2e} <= 1e-12 (T<=1000)"


def _convergence():
    limit = -math.expm1(-0.5)
    seq = [
        oracle.xor_finite_mutual_information(oracle.XorExactConfig.from_params(T, 0.5, 1.0))
        for T in (10**2, 10**3, 10**4, 10**5)
    ]
    err = abs(seq[-1] - limit)
    monotone = all(x > y for x, y in zip(seq, seq[1:]))
    return err <= 1e-4 and monotone, f"|I_T - limit| at T=1e5 = {err:.2e} <= 1e-4; decreasing={monotone}"


def _monte_carlo_calibration():
    results = []
    for T, tau, a in ((2, 0.5, 1.0), (1000, 0.5, 1.0)):
        cfg = SimConfig(T, tau, a, 100_000, 0)
        exact_cfg = oracle.XorExactConfig(T, cfg.B, cfg.L)
        checks = (
            ("unseen", montecarlo.estimate_unseen_probability(cfg, T), oracle.xor_unseen_probability(T, cfg.L)),
            ("distinct", montecarlo.estimate_distinct_channels(cfg, T), oracle.xor_block_entropy(exact_cfg)),
            ("mi", montecarlo.estimate_data_phase_mi(cfg), oracle.xor_finite_mutual_information(exact_cfg)),
        )
        for name, est, exact in checks:
            results.append((f"T={T},L={cfg.L} {name}", est.contains(exact), (est.mean - exact) / max(est.ci_half_width / 3.0, 1e-300)))
    ok = all(r[1] for r in results)
    detail = "; ".join(f"{n}: {z:+.2f} sigma" for n, _, z in results)
    return ok, detail


def _coding_threshold():
    rates = (0.16, 0.20, 0.24)
    out = coding.rate_sweep(1000, 0.443, 1.0, 20, rates, 50, seed=0)
    pe = [r.empirical_pe for r in out]
    monotone = all(x <= y for x, y in zip(pe, pe[1:]))
    ok = pe[0] <= 0.1 and pe[-1] >= 0.9 and monotone
    bound = (1.0 - 0.443) * -math.expm1(-0.443)
    return ok, f"pe(0.16)={pe[0]:.2f} <= 0.1, pe(0.20)={pe[1]:.2f}, pe(0.24)={pe[2]:.2f} >= 0.9, bound={bound:.4f}, monotone={monotone}"


def _counterexamples():
    T = 1000
    osc = oracle.pedagogical_entropies(Oscillation(), T, 2 * T)
    avg = analytic.averaged_h_prime(osc, T, 0.5, 0.1)
    spike = UnboundedSpike()
    r_spike = analytic.integral_consistency(analytic.entropy_surface(spike), 0.5, 0.0, spike)
    rep = Repetition()
    F_rep = analytic.entropy_surface(rep)
    r_rep = max(analytic.integral_consistency(F_rep, 0.5, float(e), rep) for e in np.linspace(-0.9, 1.0, 20))
    ok = avg == 0.5 and abs(r_spike - 1.0) <= 1e-9 and r_rep < 1e-9
    return ok, f"averaged H' = {avg!r} (== 0.5), spike residual {r_spike:.12f} (1.0 +- 1e-9), repetition max residual {r_rep:.1e} < 1e-9"


REPRO_COMMANDS = (
    ("analyze", ["analyze", "--model", "xor", "--a", "1", "--tau", "0.5", "--eps", "0:1:101"], True),
    ("analyze_rep", ["analyze", "--model", "repetition", "--tau", "0.5"], True),
    ("optimize", ["optimize", "--a-list", "0.001,1/e,1,1000"], True),
    ("simulate", ["simulate", "--T", "2", "--tau", "0.5", "--a", "1", "--trials", "20000"], True),
    ("code", ["code", "--B", "200", "--tau", "0.4", "--a", "1", "--rate-list", "0.1,0.2", "--blocks", "5", "--trials", "10"], True),
    ("examples3", ["examples", "--which", "3"], False),
    ("examples4", ["examples", "--which", "4"], False),
)


def _run_cli_set(root: Path) -> Dict[str, bytes]:
    from . import cli

    files = {}
    for name, argv, svg in REPRO_COMMANDS:
        out = root / f"{name}.csv"
        extra = ["--out", str(out), "--json", str(root / f"{name}.json"), "--seed", "7"]
        if svg:
            extra += ["--svg", str(root / f"{name}.svg")]
        code = cli.main(argv + extra)
        if code != 0:
            raise RuntimeError(f"{name} exited with {code}")
    for path in sorted(root.iterdir()):
        files[path.name] = path.read_bytes()
    return files


def _reproducibility():
    saved = os.environ.get("SOURCE_DATE_EPOCH")
    os.environ["SOURCE_DATE_EPOCH"] = "1700000000"
    try:
        with tempfile.TemporaryDirectory() as d1, tempfile.TemporaryDirectory() as d2:
            first = _run_cli_set(Path(d1))
            second = _run_cli_set(Path(d2))
    finally:
        if saved is None:
            os.environ.pop("SOURCE_DATE_EPOCH", None)
        else:
            os.environ["SOURCE_DATE_EPOCH"] = saved
    differing = sorted(k for k in first if first[k] != second.get(k))
    ok = not differing and set(first) == set(second)
    return ok, f"{len(first)} files compared, differing: {differing or 'none'}"


CRITERIA: List[Criterion] = [
    Criterion(1, "tau_opt and R_opt at a = 1/e", 1.0, _tau_opt_inverse_e),
    Criterion(2, "tau_opt regimes (a = 1, 1000, 0.001)", 5.0, _tau_opt_regimes),
    Criterion(3, "one-shot MI matches 1 - e^(-tau/a)", 1.0, _one_shot_grid),
    Criterion(4, "scaled surface matches XOR piecewise form", 1.0, _scaling_vs_piecewise),
    Criterion(5, "closed-form block entropy equals enumeration", 10.0, _oracle_equivalence),
    Criterion(6, "finite-T MI converges monotonically", 1.0, _convergence),
    Criterion(7, "Monte Carlo calibration within 3 sigma", 30.0, _monte_carlo_calibration),
    Criterion(8, "coding threshold bracket", 60.0, _coding_threshold),
    Criterion(9, "counterexample fidelity", 1.0, _counterexamples),
    Criterion(10, "byte-identical CLI reruns", 60.0, _reproducibility),
]


def run_one(criterion: Criterion) -> Outcome:
    start = time.perf_counter()
    try:
        passed, detail = criterion.check()
    except Exception as exc:  # a crash is a failure, reported not raised
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if passed and elapsed > criterion.budget_s:
        passed, detail = False, detail + f"; over runtime budget {criterion.budget_s:g}s"
    return Outcome(criterion.number, criterion.title, bool(passed), detail, elapsed, criterion.budget_s)


def select(only: Optional[Iterable[int]] = None) -> List[Criterion]:
    if only is None:
        return list(CRITERIA)
    wanted = set(only)
    unknown = wanted - {c.number for c in CRITERIA}
    if unknown:
        raise ValueError(f"unknown criteria: {sorted(unknown)}")
    return [c for c in CRITERIA if c.number in wanted]


def run(only: Optional[Iterable[int]] = None) -> List[Outcome]:
    return [run_one(c) for c in select(only)]

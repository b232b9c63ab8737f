"""Entropy surfaces, their derivatives, one-shot mutual information and the
optimal training fraction.

An entropy surface ``F(tau, eps)`` is the normalized entropy of the outputs
through position ``ceil((1+eps) T)`` given the training inputs, in bits per
training symbol. Everything else in this module is derived from it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import calculus
from .errors import (
    BoundViolation,
    DomainError,
    InsufficientSamples,
    ModelError,
    NonDifferentiablePoint,
    SurfaceEvaluationError,
    UnsupportedSurface,
)
from .models import (
    ModelSpec,
    Oscillation,
    Repetition,
    ScalarGainChannel,
    StationaryIid,
    UnboundedSpike,
    XorRandomChannel,
    check_tau,
    model_name,
    robust_ceil,
    validate_model,
)
from .oracle import limit_per_symbol_entropy

# Right limits at eps -> 0+ are extrapolated from this ladder of offsets.
EXTRAPOLATION_LADDER = (1e-3, 5e-4, 2.5e-4)
GAUSS_HERMITE_POINTS = 64


@dataclass(frozen=True)
class EntropySurface:
    """Closed-form ``F(tau, eps)`` for one model.

    ``input_free`` marks processes with no input, for which conditioning on
    inputs is vacuous and every conditioning regime collapses onto ``F``.
    """

    name: str
    func: Callable[[float, float], float] = field(repr=False)
    kinks: Tuple[float, ...] = ()
    input_free: bool = False
    eps_min: float = 0.0
    domain_note: str = "defined for eps >= 0 (generator convention)"

    def eval(self, tau: float, eps: float) -> float:
        value = self.func(tau, eps)
        if not math.isfinite(value):
            raise SurfaceEvaluationError(
                f"surface evaluation failed: {self.name}({tau!r}, {eps!r}) = {value!r}"
            )
        return value

    __call__ = eval


def _relative_expm1(x: float) -> float:
    """(1 - e^{-x}) / x, continuous at x = 0."""
    if x == 0.0:
        return 1.0
    return -math.expm1(-x) / x


def xor_surface_value(a: float, tau: float, eps: float) -> float:
    """(a/tau)(1 - e^{-tau/a}) + eps."""
    return _relative_expm1(tau / a) + eps


def entropy_surface(model: ModelSpec) -> EntropySurface:
    """Closed-form entropy surface of a registry model."""
    model = validate_model(model)
    name = model_name(model)
    if isinstance(model, XorRandomChannel):
        a = model.a
        return EntropySurface(name, lambda tau, eps: xor_surface_value(a, tau, eps))
    if isinstance(model, ScalarGainChannel):
        raise UnsupportedSurface(
            "unsupported surface: the scalar gain channel has no entropy surface; "
            "use scalar_gain_bound"
        )
    note = "input-free process, defined for eps > -1"
    if isinstance(model, StationaryIid):
        h = model.h
        return EntropySurface(name, lambda tau, eps: (1.0 + eps) * h, (), True, -1.0, note)
    if isinstance(model, Repetition):
        return EntropySurface(name, lambda tau, eps: min(1.0 + eps, 1.0), (0.0,), True, -1.0, note)
    if isinstance(model, Oscillation):
        return EntropySurface(name, lambda tau, eps: (1.0 + eps) / 2.0, (), True, -1.0, note)
    if isinstance(model, UnboundedSpike):
        return EntropySurface(
            name,
            lambda tau, eps: 1.0 + eps if eps < -0.5 else 2.0 + eps,
            (-0.5,),
            True,
            -1.0,
            note,
        )
    raise ModelError(f"unknown model {model!r}")


# -- conditioning regimes ---------------------------------------------------


class ScaledEntropyPoint(NamedTuple):
    eps: float
    delta: float
    value: float


def _check_offset(name: str, x: float, tau: float) -> float:
    x = float(x)
    if not (x > -1.0):
        raise DomainError(f"{name} must exceed -1, got {x!r}")
    if x > 1.0 / tau - 1.0 + 1e-12:
        raise DomainError(f"{name}={x!r} exceeds 1/tau - 1 for tau={tau!r}")
    return x


def scale_surface(F: EntropySurface, tau: float, eps: float, delta: float) -> ScaledEntropyPoint:
    """Normalized entropy of outputs through offset ``eps`` given inputs through
    offset ``delta``, obtained by rescaling the surface::

        (1+u) F((1+u) tau, (eps-u)/(1+delta)),  u = min(eps, delta)
    """
    tau = check_tau(tau)
    eps = _check_offset("eps", eps, tau)
    delta = _check_offset("delta", delta, tau)
    if F.input_free:
        return ScaledEntropyPoint(eps, delta, F.eval(tau, eps))
    u = min(eps, delta)
    scaled_tau = (1.0 + u) * tau
    if scaled_tau > 1.0 + 1e-12:
        raise DomainError("scaled training fraction out of range")
    value = (1.0 + u) * F.eval(scaled_tau, (eps - u) / (1.0 + delta))
    return ScaledEntropyPoint(eps, delta, value)


def data_entropy(F: EntropySurface, tau: float, eps: float) -> float:
    """Entropy of outputs through ``eps`` given the training inputs only."""
    return scale_surface(F, tau, eps, 0.0).value


def diag_entropy(F: EntropySurface, tau: float, eps: float) -> float:
    """Entropy of outputs through ``eps`` given inputs through ``eps``."""
    return scale_surface(F, tau, eps, eps).value


def data_kinks(F: EntropySurface) -> Tuple[float, ...]:
    # dropping the inputs at the training/data boundary creates a kink at 0
    return F.kinks if F.input_free else tuple(sorted({*F.kinks, 0.0}))


def h_prime_data(F: EntropySurface, tau: float, eps: float) -> float:
    """Derivative in eps of the data-regime entropy.

    Raises NonDifferentiablePoint at a kink (eps = 0 for input-driven models).
    """
    tau = check_tau(tau)
    eps = _check_offset("eps", eps, tau)
    return calculus.derivative(
        lambda e: data_entropy(F, tau, e), eps, data_kinks(F), lo=-1.0, hi=1.0 / tau - 1.0
    )


def h_prime_diag(F: EntropySurface, tau: float, eps: float) -> float:
    """Derivative in eps of the entropy with inputs advancing alongside outputs.

    For input-driven models this differentiates ``(1+eps) F((1+eps) tau, 0)``.
    """
    tau = check_tau(tau)
    eps = float(eps)
    if (1.0 + eps) * tau > 1.0 + 1e-12:
        raise DomainError("scaled training fraction out of range")
    eps = _check_offset("eps", eps, tau)
    kinks = F.kinks if F.input_free else ()
    return calculus.derivative(
        lambda e: diag_entropy(F, tau, e), eps, kinks, lo=-1.0, hi=1.0 / tau - 1.0
    )


def _ladder(tau: float) -> Tuple[float, ...]:
    room = 1.0 / tau - 1.0
    top = min(EXTRAPOLATION_LADDER[0], room / 2.0)
    if top < 1e-9:
        raise DomainError(f"no data phase to take eps -> 0+ limits in for tau={tau!r}")
    scale = top / EXTRAPOLATION_LADDER[0]
    return tuple(scale * e for e in EXTRAPOLATION_LADDER)


class PhaseLimits(NamedTuple):
    """Right limits at eps -> 0+ of the two per-symbol entropies and their gap."""

    hprime_data: float
    hprime_diag: float
    gap: float


def phase_limits(F: EntropySurface, tau: float) -> PhaseLimits:
    """Extrapolate both derivatives to eps = 0+ and take their difference."""
    tau = check_tau(tau)
    ladder = _ladder(tau)
    data = calculus.extrapolate_to_zero(ladder, [h_prime_data(F, tau, e) for e in ladder])
    diag = calculus.extrapolate_to_zero(ladder, [h_prime_diag(F, tau, e) for e in ladder])
    if not (math.isfinite(data) and math.isfinite(diag)):
        raise SurfaceEvaluationError("surface evaluation failed")
    return PhaseLimits(data, diag, data - diag)


def one_shot_mutual_information(F: EntropySurface, tau: float) -> float:
    """Per-symbol mutual information at the start of the data phase, learned
    from training alone, as the jump between the two derivatives at eps = 0+.
    """
    gap = phase_limits(F, tau).gap
    if gap < -1e-9:
        warnings.warn(f"extrapolated phase gap {gap:.3e} is negative; clamped to 0", RuntimeWarning)
    return max(gap, 0.0)


def lower_bound_rate(F: EntropySurface, tau: float) -> float:
    """(1 - tau) times the one-shot mutual information, bits per received symbol."""
    tau = check_tau(tau)
    if tau == 1.0:
        return 0.0
    return (1.0 - tau) * one_shot_mutual_information(F, tau)


def xor_mutual_information(a: float, tau: float, eps: float = 0.0) -> float:
    """Closed form 1 - exp(-(tau/a)(1+eps)) for the XOR model."""
    return -math.expm1(-(tau / a) * (1.0 + eps))


def offset_mutual_information(F: EntropySurface, tau: float, eps: float) -> float:
    """Mutual information of the symbol at offset ``eps`` given everything
    before it, as the gap between the right derivative of the data regime
    (inputs frozen at ``eps``) and the diagonal derivative at ``eps``.
    """
    tau = check_tau(tau)
    room = 1.0 / tau - 1.0 - eps
    top = min(EXTRAPOLATION_LADDER[0], room / 2.0)
    if top < 1e-9:
        raise DomainError("no room to the right of eps for a right limit")
    ladder = [top * e / EXTRAPOLATION_LADDER[0] for e in EXTRAPOLATION_LADDER]

    def frozen(e):
        return scale_surface(F, tau, e, eps).value

    hi = 1.0 / tau - 1.0
    right = [
        calculus.derivative(frozen, eps + s, (eps,), lo=-1.0, hi=hi) for s in ladder
    ]
    data = calculus.extrapolate_to_zero(ladder, right)
    return data - h_prime_diag(F, tau, eps)


# -- Theorem-2 style integral check ----------------------------------------


def _regime_entropy(F, tau, eps, regime):
    if F.input_free:
        return F.eval(tau, eps)
    if regime == "data":
        return data_entropy(F, tau, eps)
    if regime == "diagonal":
        return diag_entropy(F, tau, eps)
    raise ValueError(f"unknown regime {regime!r}")


def integral_consistency(
    F: EntropySurface, tau: float, eps: float, model: ModelSpec, regime: str = "data"
) -> float:
    """|H(eps) - integral_{-1}^{eps} H'(u) du| where H' is the model's limiting
    per-symbol entropy law.

    The quadrature is split at every kink. Impulses in H' are not modelled,
    so a process with an unbounded per-symbol entropy shows a residual.
    """
    model = validate_model(model)
    tau = check_tau(tau)
    h = _regime_entropy(F, tau, eps, regime)
    breaks = data_kinks(F) if regime == "data" else F.kinks

    def law(u):
        return limit_per_symbol_entropy(model, u, tau=tau, regime=regime)

    integral = calculus.adaptive_simpson(law, -1.0, eps, tol=1e-9, max_depth=40, breakpoints=breaks)
    return abs(h - integral)


def averaged_h_prime(per_symbol_entropies, T: int, eps: float, kappa: float) -> float:
    """Window mean of H(y_{t+1} | y^t) over
    ``t = ceil((1+eps-kappa/2) T) ... ceil((1+eps+kappa/2) T) - 1``.

    ``per_symbol_entropies`` is a mapping or an iterable of ``(t, bits)``.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    table = dict(per_symbol_entropies.items() if hasattr(per_symbol_entropies, "items") else per_symbol_entropies)
    start = robust_ceil((1.0 + eps - kappa / 2.0) * T)
    stop = robust_ceil((1.0 + eps + kappa / 2.0) * T)
    window = range(start, stop)
    if len(window) == 0 or any(t not in table for t in window):
        raise InsufficientSamples(
            f"insufficient samples: need per-symbol entropies for t in [{start}, {stop - 1}]"
        )
    return math.fsum(table[t] for t in window) / len(window)


# -- optimal training ------------------------------------------------------


@dataclass(frozen=True)
class TauOptResult:
    tau_opt: float
    r_opt: float
    i_at_opt: float
    bracket: Tuple[float, float]


def _mutual_information_fn(model: ModelSpec) -> Callable[[float], float]:
    if isinstance(model, XorRandomChannel):
        a = model.a
        return lambda tau: xor_mutual_information(a, tau)
    F = entropy_surface(model)
    return lambda tau: one_shot_mutual_information(F, tau)


def optimize_tau(model: ModelSpec, tol: float = 1e-10) -> TauOptResult:
    """Maximize (1 - tau) I(tau) over tau in (0, 1).

    A 64-point grid brackets the global maximum (unimodality is not assumed),
    then golden-section search narrows the bracket to ``tol``.
    """
    model = validate_model(model)
    mi = _mutual_information_fn(model)

    def objective(tau):
        value = (1.0 - tau) * mi(tau)
        return value if math.isfinite(value) else math.nan

    lo, hi, _, _ = calculus.grid_bracket_max(objective, 0.0, 1.0, 64)
    tau_opt, _ = calculus.golden_section_max(objective, lo, hi, tol)
    i_opt = mi(tau_opt)
    return TauOptResult(tau_opt, (1.0 - tau_opt) * i_opt, i_opt, (lo, hi))


def asymptotic_tau_reference(a: float) -> Optional[float]:
    """Limiting optimal training fraction, or None outside the known regimes.

    ``-a ln a`` for a <= 0.01, 1/2 for a >= 100, and 1/e at a = 1/e.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if a <= 0.01:
        return -a * math.log(a)
    if a >= 100:
        return 0.5
    if math.isclose(a, 1.0 / math.e, rel_tol=1e-12):
        return 1.0 / math.e
    return None


def asymptotic_rate_reference(a: float) -> Optional[float]:
    """Limiting optimal rate matching :func:`asymptotic_tau_reference`."""
    if a <= 0:
        raise ValueError("a must be positive")
    if a <= 0.01:
        return (1.0 + a * math.log(a)) * (1.0 - a)
    if a >= 100:
        return 0.5 * -math.expm1(-1.0 / (2.0 * a))
    if math.isclose(a, 1.0 / math.e, rel_tol=1e-12):
        return (1.0 - 1.0 / math.e) ** 2
    return None


# -- scalar gain channel ---------------------------------------------------


def gain_expectation(model: ScalarGainChannel) -> float:
    """E log2(1 + g^2), by sample mean or 64-point Gauss-Hermite quadrature."""
    model = validate_model(model)
    if not isinstance(model, ScalarGainChannel):
        raise ModelError("gain_expectation needs a ScalarGainChannel")
    if model.gains is not None:
        g = np.asarray(model.gains, dtype=float)
        return float(np.mean(np.log2(1.0 + g * g)))
    d = model.distribution
    nodes, weights = np.polynomial.hermite_e.hermegauss(GAUSS_HERMITE_POINTS)
    g = d.mean + d.std * nodes
    return float(np.dot(weights, np.log2(1.0 + g * g)) / math.sqrt(2.0 * math.pi))


def scalar_gain_bound(model: ScalarGainChannel, tau: float) -> float:
    """((1 - tau) / 2) E log2(1 + g^2), bits per received symbol."""
    tau = check_tau(tau)
    return (1.0 - tau) / 2.0 * gain_expectation(model)


# -- bound chain -----------------------------------------------------------


@dataclass(frozen=True)
class BoundChain:
    integral_bound: float
    one_shot_bound: float
    eps_grid: Tuple[float, ...]
    offset_mi: Tuple[float, ...]

    @property
    def values(self) -> List[float]:
        return [self.integral_bound, self.one_shot_bound]


def bound_chain(model: XorRandomChannel, tau: float, eps_grid: Sequence[float] = ()) -> BoundChain:
    """Integral bound ``tau * int_0^{1/tau-1} I_eps d eps`` and the one-shot
    bound ``(1-tau) I`` for the XOR model, with their ordering checked.

    Raises BoundViolation if the integral bound falls below the one-shot bound
    or if I_eps decreases along ``eps_grid``.
    """
    model = validate_model(model)
    if not isinstance(model, XorRandomChannel):
        raise ModelError("bound_chain needs closed forms; only the XOR model has them")
    tau = check_tau(tau)
    a = model.a
    upper = 1.0 / tau - 1.0
    integral = tau * calculus.adaptive_simpson(lambda e: xor_mutual_information(a, tau, e), 0.0, upper)
    one_shot = (1.0 - tau) * xor_mutual_information(a, tau)
    grid = tuple(float(e) for e in eps_grid)
    offset = tuple(xor_mutual_information(a, tau, e) for e in grid)
    if integral < one_shot - 1e-12:
        raise BoundViolation(f"integral bound {integral!r} below one-shot bound {one_shot!r}")
    order = np.argsort(grid)
    mi_sorted = np.asarray(offset)[order] if grid else np.empty(0)
    if np.any(np.diff(mi_sorted) < -1e-15):
        raise BoundViolation("offset mutual information decreases in eps")
    return BoundChain(integral, one_shot, grid, offset)


# -- tabulation ------------------------------------------------------------


@dataclass(frozen=True)
class PhaseCurves:
    eps_grid: np.ndarray
    h_data: np.ndarray
    h_diag: np.ndarray
    hprime_data: np.ndarray
    hprime_diag: np.ndarray
    mutual_info: float


def _derivative_or_right(fn, *args):
    # at a kink report the right derivative (the eps >= 0 convention)
    try:
        return fn(*args)
    except NonDifferentiablePoint as exc:
        return exc.right if exc.right is not None else exc.left


def tabulate_curves(F: EntropySurface, tau: float, eps_grid: Sequence[float]) -> PhaseCurves:
    """Both conditioning regimes and their derivatives over ``eps_grid``."""
    tau = check_tau(tau)
    grid = np.asarray(eps_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("eps_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("eps_grid must be strictly increasing")
    if grid[0] <= -1.0:
        raise DomainError("eps_grid entries must exceed -1")
    if grid[-1] > 1.0 / tau - 1.0 + 1e-12:
        raise DomainError("eps_grid exceeds 1/tau - 1")
    h_data = np.array([data_entropy(F, tau, e) for e in grid])
    h_diag = np.array([diag_entropy(F, tau, e) for e in grid])
    hp_data = np.array([_derivative_or_right(h_prime_data, F, tau, e) for e in grid])
    hp_diag = np.array([_derivative_or_right(h_prime_diag, F, tau, e) for e in grid])
    mi = 0.0 if tau == 1.0 else one_shot_mutual_information(F, tau)
    return PhaseCurves(grid, h_data, h_diag, hp_data, hp_diag, mi)


def lemma_a2_holds(F: EntropySurface, tau: float, tol: float = 1e-6) -> bool:
    """Check that the data-regime per-symbol entropy has matching limits from
    eps -> 0+ (inputs frozen at 0) and delta -> 0- (eps = 0, inputs frozen at
    delta), which together with memorylessness gives continuity at 0+.
    """
    tau = check_tau(tau)
    ladder = _ladder(tau)
    right = calculus.extrapolate_to_zero(ladder, [h_prime_data(F, tau, e) for e in ladder])
    left_vals = []
    for s in ladder:
        delta = -s
        left_vals.append(
            calculus.derivative(
                lambda e: scale_surface(F, tau, e, delta).value,
                0.0,
                (delta,),
                lo=-1.0,
                hi=1.0 / tau - 1.0,
            )
        )
    left = calculus.extrapolate_to_zero([-s for s in ladder], left_vals)
    return abs(right - left) <= tol

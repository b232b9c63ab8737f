"""Numerical differentiation, quadrature and scalar maximization.

The entropy surfaces handled here are piecewise smooth with known kink
locations, so every routine takes the kink set explicitly instead of trying
to detect it.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import NonDifferentiablePoint, ObjectiveError, QuadratureError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

# Points closer than this to a declared kink are treated as sitting on it.
KINK_ATOL = 1e-12


def default_step(x: float) -> float:
    return 1e-4 * max(1.0, abs(x))


def one_sided_derivative(f: Callable[[float], float], x: float, h: float, direction: int) -> float:
    """Forward (direction=+1) or backward (-1) difference with one Richardson step.

    Uses only points on one side of ``x`` (x itself included), so it is safe
    at a kink or a domain edge.
    """
    fx = f(x)
    d_full = (f(x + direction * h) - fx) / (direction * h)
    d_half = (f(x + direction * h / 2) - fx) / (direction * h / 2)
    return 2.0 * d_half - d_full


def derivative(
    f: Callable[[float], float],
    x: float,
    kinks: Iterable[float] = (),
    lo: float = -math.inf,
    hi: float = math.inf,
    h: Optional[float] = None,
) -> float:
    """Derivative of a piecewise-smooth function.

    Central differences with ``h = 1e-4*max(1,|x|)``; within ``2h`` of a kink
    or of the domain edge ``[lo, hi]`` the stencil becomes one-sided, pointing
    away from the obstacle, with Richardson extrapolation.

    Raises NonDifferentiablePoint when ``x`` sits on a kink.
    """
    h = default_step(x) if h is None else h
    kinks = tuple(kinks)
    for k in kinks:
        if abs(x - k) <= KINK_ATOL:
            left = right = None
            if x - lo > KINK_ATOL:
                left = one_sided_derivative(f, x, min(h, (x - lo) / 2), -1)
            if hi - x > KINK_ATOL:
                right = one_sided_derivative(f, x, min(h, (hi - x) / 2), +1)
            raise NonDifferentiablePoint(x, left, right)

    room_right = min([hi - x] + [k - x for k in kinks if k > x])
    room_left = min([x - lo] + [x - k for k in kinks if k < x])
    if room_left >= 2 * h and room_right >= 2 * h:
        return (f(x + h) - f(x - h)) / (2 * h)
    if room_right >= room_left:
        return one_sided_derivative(f, x, min(h, room_right), +1)
    return one_sided_derivative(f, x, min(h, room_left), -1)


def extrapolate_to_zero(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Intercept at x=0 of the least-squares line through (xs, ys)."""
    slope, intercept = np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)
    return float(intercept)


def _simpson(fa, fm, fb, width):
    return width / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-9,
    max_depth: int = 40,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson.

    The interval is split at every breakpoint inside ``(a, b)``; each piece
    is evaluated strictly inside its endpoints so a jump located exactly at a
    breakpoint never contaminates the neighbouring piece.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth, breakpoints)
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        nudge = 1e-13 * max(1.0, abs(lo), abs(hi))
        lo_in, hi_in = lo + nudge, hi - nudge
        total += _integrate_piece(f, lo_in, hi_in, tol * (hi - lo) / (b - a), max_depth)
    return total


def _integrate_piece(f, a, b, tol, max_depth):
    fa, fb, fm = f(a), f(b), f((a + b) / 2)
    whole = _simpson(fa, fm, fb, b - a)
    # explicit stack keeps deep refinement off the Python recursion limit
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = (lo + hi) / 2
        fl = f((lo + mid) / 2)
        fr = f((mid + hi) / 2)
        left = _simpson(flo, fl, fmid, mid - lo)
        right = _simpson(fmid, fr, fhi, hi - mid)
        delta = left + right - whole
        if not math.isfinite(delta):
            raise QuadratureError("quadrature failed: non-finite integrand")
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            raise QuadratureError(
                f"quadrature failed: no convergence on [{lo!r}, {hi!r}] at depth {depth}"
            )
        else:
            stack.append((lo, mid, flo, fl, fmid, left, eps / 2, depth + 1))
            stack.append((mid, hi, fmid, fr, fhi, right, eps / 2, depth + 1))
    return total


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> Tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def grid_bracket_max(
    f: Callable[[float], float], lo: float, hi: float, points: int = 64
) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """Scan ``points`` interior grid points of ``(lo, hi)``.

    Returns the bracket ``(left, right)`` around the best grid point plus the
    grid and its values. Endpoints are never evaluated.
    """
    grid = np.linspace(lo, hi, points + 2)
    values = np.array([f(x) for x in grid[1:-1]], dtype=float)
    if not np.all(np.isfinite(values)):
        raise ObjectiveError("objective evaluation failed")
    i = int(np.argmax(values)) + 1
    return float(grid[i - 1]), float(grid[i + 1]), grid[1:-1], values

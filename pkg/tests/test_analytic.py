import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasetrain import analytic, oracle
from phasetrain.errors import (
    BoundViolation,
    DomainError,
    InsufficientSamples,
    NonDifferentiablePoint,
    SurfaceEvaluationError,
    UnsupportedSurface,
)
from phasetrain.models import (
    GainDistribution,
    Oscillation,
    Repetition,
    ScalarGainChannel,
    StationaryIid,
    UnboundedSpike,
    XorRandomChannel,
)

E = math.e
XOR1 = analytic.entropy_surface(XorRandomChannel(1.0))


# -- surfaces ----------------------------------------------------------------


def test_xor_surface_values():
    assert XOR1(0.5, 0.0) == pytest.approx(0.7869386805747332, abs=1e-12)
    assert XOR1(0.5, 1.0) == pytest.approx(1.7869386805747332, abs=1e-12)
    assert XOR1(0.5, 0.0) == pytest.approx(2 * (1 - math.exp(-0.5)), abs=1e-15)


def test_pedagogical_surfaces_and_kinks():
    assert analytic.entropy_surface(Oscillation())(0.5, 1.0) == 1.0
    rep = analytic.entropy_surface(Repetition())
    assert rep.kinks == (0.0,)
    assert rep(0.5, -0.5) == 0.5 and rep(0.5, 0.5) == 1.0
    spike = analytic.entropy_surface(UnboundedSpike())
    assert spike.kinks == (-0.5,)
    assert spike(0.5, -0.6) == pytest.approx(0.4) and spike(0.5, -0.5) == 1.5
    assert analytic.entropy_surface(StationaryIid(0.7))(0.5, 1.0) == pytest.approx(1.4)


def test_scalar_gain_has_no_surface():
    with pytest.raises(UnsupportedSurface, match="unsupported surface"):
        analytic.entropy_surface(ScalarGainChannel(gains=(1.0,)))


def test_non_finite_surface_is_reported():
    bad = analytic.EntropySurface("bad", lambda tau, eps: math.inf)
    with pytest.raises(SurfaceEvaluationError, match="surface evaluation failed"):
        bad(0.5, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 10.0), st.floats(0.01, 1.0), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_xor_surface_non_negative_and_non_decreasing(a, tau, e1, e2):
    F = analytic.entropy_surface(XorRandomChannel(a))
    lo, hi = sorted((e1, e2))
    assert 0.0 <= F(tau, lo) <= F(tau, hi)


# -- scaling -------------------------------------------------------------------


def test_scale_surface_examples():
    assert analytic.scale_surface(XOR1, 0.5, 1.0, 0.0).value == pytest.approx(1.786939, abs=1e-6)
    assert analytic.scale_surface(XOR1, 0.5, 1.0, 1.0).value == pytest.approx(2 * (1 - math.exp(-1)), abs=1e-12)
    assert analytic.scale_surface(XOR1, 0.3, 0.0, 0.0).value == XOR1(0.3, 0.0)


def test_scale_surface_domain():
    with pytest.raises(DomainError):
        analytic.scale_surface(XOR1, 0.5, 1.5, 0.0)
    with pytest.raises(DomainError):
        analytic.scale_surface(XOR1, 0.5, -1.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.05, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_scaled_value_non_increasing_in_delta(a, tau, fe, f1, f2):
    F = analytic.entropy_surface(XorRandomChannel(a))
    hi = 1.0 / tau - 1.0
    span = hi + 0.99
    eps = -0.99 + fe * span
    d1, d2 = sorted((-0.99 + f1 * span, -0.99 + f2 * span))
    v1 = analytic.scale_surface(F, tau, eps, d1).value
    v2 = analytic.scale_surface(F, tau, eps, d2).value
    assert v1 >= v2 - 1e-12 and v2 >= 0


# -- derivatives ----------------------------------------------------------------


@pytest.mark.parametrize(
    "model, eps, expected",
    [(XorRandomChannel(1.0), 0.5, 1.0), (Oscillation(), 0.5, 0.5), (Repetition(), 0.5, 0.0)],
)
def test_h_prime_data_examples(model, eps, expected):
    F = analytic.entropy_surface(model)
    assert analytic.h_prime_data(F, 0.5, eps) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize(
    "model, eps, expected",
    [
        (XorRandomChannel(1.0), 0.0, math.exp(-0.5)),
        (XorRandomChannel(1.0), 1.0, math.exp(-1.0)),
        (StationaryIid(1.0), 0.3, 1.0),
    ],
)
def test_h_prime_diag_examples(model, eps, expected):
    F = analytic.entropy_surface(model)
    assert analytic.h_prime_diag(F, 0.5, eps) == pytest.approx(expected, abs=1e-6)


def test_h_prime_data_at_kink_carries_both_sides():
    with pytest.raises(NonDifferentiablePoint) as info:
        analytic.h_prime_data(XOR1, 0.5, 0.0)
    assert info.value.left == pytest.approx(math.exp(-0.5), abs=1e-6)
    assert info.value.right == pytest.approx(1.0, abs=1e-6)


def test_h_prime_diag_domain():
    with pytest.raises(DomainError, match="out of range"):
        analytic.h_prime_diag(XOR1, 0.5, 1.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.05, 0.95), st.floats(0.01, 0.99))
def test_derivatives_match_closed_forms(a, tau, frac):
    F = analytic.entropy_surface(XorRandomChannel(a))
    eps = frac * (1.0 / tau - 1.0)
    if eps < 1e-3:
        return
    data = analytic.h_prime_data(F, tau, eps)
    diag = analytic.h_prime_diag(F, tau, eps)
    assert data == pytest.approx(1.0, abs=1e-6)
    assert diag == pytest.approx(math.exp(-(tau / a) * (1 + eps)), abs=1e-6)
    assert data - diag > 0


# -- one-shot mutual information --------------------------------------------


@pytest.mark.parametrize(
    "a, tau, expected", [(1.0, 0.5, 1 - math.exp(-0.5)), (1 / E, 1 / E, 1 - math.exp(-1.0))]
)
def test_one_shot_mi_examples(a, tau, expected):
    F = analytic.entropy_surface(XorRandomChannel(a))
    assert analytic.one_shot_mutual_information(F, tau) == pytest.approx(expected, abs=1e-6)


def test_one_shot_mi_vacuous_conditioning():
    F = analytic.entropy_surface(StationaryIid(0.8))
    assert analytic.one_shot_mutual_information(F, 0.5) == pytest.approx(0.0, abs=1e-9)


def test_one_shot_mi_clamps_negative_gap_with_warning():
    # a surface whose diagonal grows faster than its data regime
    F = analytic.EntropySurface("odd", lambda tau, eps: 2.0 - (1.0 + eps) ** 2 / 2)
    with pytest.warns(RuntimeWarning, match="clamped"):
        assert analytic.one_shot_mutual_information(F, 0.5) == 0.0


def test_one_shot_mi_increasing_in_tau():
    values = [analytic.one_shot_mutual_information(XOR1, t) for t in np.linspace(0.05, 0.95, 19)]
    assert all(x <= y for x, y in zip(values, values[1:]))


def test_lower_bound_rate_examples():
    assert analytic.lower_bound_rate(XOR1, 0.5) == pytest.approx(0.196735, abs=1e-6)
    assert analytic.lower_bound_rate(XOR1, 1.0) == 0.0
    F = analytic.entropy_surface(XorRandomChannel(1 / E))
    assert analytic.lower_bound_rate(F, 1 / E) == pytest.approx((1 - 1 / E) ** 2, abs=1e-6)


def test_rate_vanishes_at_both_ends():
    assert analytic.lower_bound_rate(XOR1, 1e-6) < 1e-5
    assert analytic.lower_bound_rate(XOR1, 1.0) == 0.0
    assert analytic.lower_bound_rate(XOR1, 0.44) > 0.19


def test_offset_mi_matches_closed_form():
    for eps in (0.0, 0.25, 0.5):
        got = analytic.offset_mutual_information(XOR1, 0.5, eps)
        assert got == pytest.approx(analytic.xor_mutual_information(1.0, 0.5, eps), abs=1e-6)


def test_lemma_a2_for_xor():
    assert analytic.lemma_a2_holds(XOR1, 0.5)


# -- integral relation and averaging -----------------------------------------


def test_integral_consistency_examples():
    rep = Repetition()
    assert analytic.integral_consistency(analytic.entropy_surface(rep), 0.5, 0.5, rep) < 1e-9
    xor = XorRandomChannel(1.0)
    assert analytic.integral_consistency(XOR1, 0.5, 1.0, xor, regime="diagonal") < 1e-6
    assert analytic.integral_consistency(XOR1, 0.5, 0.7, xor, regime="data") < 1e-6
    spike = UnboundedSpike()
    r = analytic.integral_consistency(analytic.entropy_surface(spike), 0.5, 0.0, spike)
    assert r == pytest.approx(1.0, abs=1e-9)


def test_averaged_h_prime_examples():
    T = 1000
    osc = oracle.pedagogical_entropies(Oscillation(), T, 2 * T)
    assert analytic.averaged_h_prime(osc, T, 0.5, 0.1) == 0.5
    rep = oracle.pedagogical_entropies(Repetition(), T, 2 * T)
    assert analytic.averaged_h_prime(rep, T, 0.5, 0.1) == 0.0
    const = {t: 0.3 for t in range(2000)}
    assert analytic.averaged_h_prime(const, T, 0.5, 0.1) == pytest.approx(0.3, abs=1e-15)


def test_averaged_h_prime_insufficient_samples():
    with pytest.raises(InsufficientSamples, match="insufficient samples"):
        analytic.averaged_h_prime([(t, 1.0) for t in range(100)], 1000, 0.5, 0.1)


# -- optimization --------------------------------------------------------------


def test_optimize_tau_examples():
    r = analytic.optimize_tau(XorRandomChannel(1 / E))
    assert r.tau_opt == pytest.approx(1 / E, abs=1e-6)
    assert r.r_opt == pytest.approx((1 - 1 / E) ** 2, abs=1e-9)
    assert analytic.optimize_tau(XorRandomChannel(1.0)).tau_opt == pytest.approx(0.44, abs=0.01)
    assert analytic.optimize_tau(XorRandomChannel(1000.0)).tau_opt == pytest.approx(0.5, abs=0.01)


@pytest.mark.parametrize("a", [0.01, 0.1, 1 / E, 1.0, 10.0, 100.0])
def test_optimize_tau_invariants_and_stationarity(a):
    r = analytic.optimize_tau(XorRandomChannel(a))
    assert 0 < r.tau_opt < 1
    assert r.r_opt == pytest.approx((1 - r.tau_opt) * r.i_at_opt, abs=1e-12)
    g = lambda t: (1 - t) * analytic.xor_mutual_information(a, t)
    h = 1e-5
    assert abs((g(r.tau_opt + h) - g(r.tau_opt - h)) / (2 * h)) < 1e-4


def test_optimize_tau_surface_route_agrees_with_closed_form():
    # a surface-only copy of the XOR model goes through derivative extrapolation
    surf = analytic.EntropySurface("xor-copy", XOR1.func)
    mi = lambda t: analytic.one_shot_mutual_information(surf, t)
    obj = lambda t: (1 - t) * mi(t)
    from phasetrain import calculus

    lo, hi, _, _ = calculus.grid_bracket_max(obj, 0.0, 1.0, 64)
    t, _ = calculus.golden_section_max(obj, lo, hi, 1e-8)
    assert t == pytest.approx(analytic.optimize_tau(XorRandomChannel(1.0)).tau_opt, abs=1e-4)


def test_asymptotic_references():
    assert analytic.asymptotic_tau_reference(0.001) == pytest.approx(0.006908, abs=1e-6)
    assert analytic.asymptotic_tau_reference(1 / E) == pytest.approx(0.367879, abs=1e-6)
    assert analytic.asymptotic_tau_reference(1.0) is None
    assert analytic.asymptotic_tau_reference(500.0) == 0.5
    assert analytic.asymptotic_rate_reference(1 / E) == pytest.approx((1 - 1 / E) ** 2)


# -- scalar gain ------------------------------------------------------------------


def test_scalar_gain_bound_examples():
    assert analytic.scalar_gain_bound(ScalarGainChannel(gains=(0.0,)), 0.3) == 0.0
    assert analytic.scalar_gain_bound(ScalarGainChannel(gains=(1.0,)), 0.5) == pytest.approx(0.25)
    m = ScalarGainChannel(gains=(0.3, 1.2, -2.0))
    values = [analytic.scalar_gain_bound(m, t) for t in (0.01, 0.2, 0.5, 0.9)]
    assert values == sorted(values, reverse=True)


def test_gauss_hermite_against_fine_grid():
    m = ScalarGainChannel(distribution=GainDistribution("normal", 0.0, 1.0))
    x = np.linspace(-12, 12, 200_001)
    w = np.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    ref = np.trapezoid(w * np.log2(1 + x * x), x)
    assert analytic.gain_expectation(m) == pytest.approx(ref, abs=1e-6)


# -- bound chain -----------------------------------------------------------------


def test_bound_chain_values():
    chain = analytic.bound_chain(XorRandomChannel(1.0), 0.5, [0.0, 0.5, 1.0])
    assert chain.one_shot_bound == pytest.approx(0.196735, abs=1e-6)
    closed = 0.5 * (1 - 2 * (math.exp(-0.5) - math.exp(-1.0)))
    assert chain.integral_bound == pytest.approx(closed, abs=1e-9)
    assert chain.integral_bound == pytest.approx(0.261349, abs=1e-6)
    assert chain.values[0] >= chain.values[1]
    assert list(chain.offset_mi) == sorted(chain.offset_mi)


def test_bound_chain_at_tau_one_is_zero():
    chain = analytic.bound_chain(XorRandomChannel(1.0), 1.0)
    assert chain.integral_bound == 0.0 and chain.one_shot_bound == 0.0


def test_bound_chain_checks_ordering():
    assert issubclass(BoundViolation, AssertionError)


# -- tabulation -------------------------------------------------------------------


def test_tabulate_curves_invariants():
    grid = np.linspace(-0.5, 1.0, 31)
    c = analytic.tabulate_curves(XOR1, 0.5, grid)
    assert np.all(c.h_data >= 0) and np.all(c.h_diag >= 0)
    pos = grid > 0
    assert np.all(c.hprime_data[pos] >= c.hprime_diag[pos])
    assert c.mutual_info == pytest.approx(1 - math.exp(-0.5), abs=1e-6)
    # at the kink the right derivative is reported
    at0 = np.flatnonzero(grid == 0.0)
    assert c.hprime_data[at0[0]] == pytest.approx(1.0, abs=1e-6)


def test_tabulate_repetition_piecewise():
    grid = np.linspace(-0.5, 1.0, 16)
    c = analytic.tabulate_curves(analytic.entropy_surface(Repetition()), 0.5, grid)
    expected = np.where(grid < 0, 1.0, 0.0)
    assert np.allclose(c.hprime_data, expected, atol=1e-6)


@pytest.mark.parametrize("grid", [[0.2, 0.1], [-1.0, 0.0], [0.0, 2.0], []])
def test_tabulate_rejects_bad_grids(grid):
    with pytest.raises(ValueError):
        analytic.tabulate_curves(XOR1, 0.5, grid)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.05, 0.95))
def test_phase_curve_invariants_random(a, tau):
    F = analytic.entropy_surface(XorRandomChannel(a))
    grid = np.linspace(-0.9, 1.0 / tau - 1.0, 12)
    c = analytic.tabulate_curves(F, tau, grid)
    assert np.all(np.diff(c.eps_grid) > 0)
    assert np.all(c.h_data >= 0) and np.all(c.h_diag >= 0)
    assert np.all(c.hprime_data[grid > 0] >= c.hprime_diag[grid > 0] - 1e-9)

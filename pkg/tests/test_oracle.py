import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from phasetrain import oracle
from phasetrain.errors import DomainError, EnumerationTooLarge, ModelError
from phasetrain.models import Oscillation, Repetition, StationaryIid, UnboundedSpike, XorRandomChannel
from phasetrain.oracle import XorExactConfig


def test_block_entropy_examples():
    assert oracle.xor_block_entropy(XorExactConfig(1, 1, 7)) == pytest.approx(1.0, abs=1e-15)
    assert oracle.xor_block_entropy(XorExactConfig(2, 4, 4), exact=True) == Fraction(7, 4)
    cfg = XorExactConfig.from_params(10**5, 0.5, 1.0)
    assert cfg.L == 2 * 10**5
    assert oracle.xor_block_entropy(cfg) / cfg.T == pytest.approx(2 * (1 - math.exp(-0.5)), abs=1e-3)


def test_bruteforce_examples():
    assert oracle.xor_block_entropy_bruteforce(XorExactConfig(2, 2, 4)) == Fraction(7, 4)
    assert oracle.xor_block_entropy_bruteforce(XorExactConfig(3, 3, 2)) == Fraction(7, 4)
    assert oracle.xor_block_entropy_bruteforce(XorExactConfig(1, 1, 1)) == 1


def test_bruteforce_budget():
    with pytest.raises(EnumerationTooLarge, match="enumeration too large"):
        oracle.xor_block_entropy_bruteforce(XorExactConfig(11, 11, 4))


@pytest.mark.parametrize("T", range(0, 7))
@pytest.mark.parametrize("L", range(1, 5))
def test_closed_form_equals_enumeration(T, L):
    cfg = XorExactConfig(T, max(T, 1), L)
    assert oracle.xor_block_entropy(cfg, exact=True) == oracle.xor_block_entropy_bruteforce(cfg)


def test_unseen_probability_examples():
    assert oracle.xor_unseen_probability(0, 5) == 1.0
    assert oracle.xor_unseen_probability(2, 4) == pytest.approx(0.5625, abs=1e-15)
    L = 10**5
    assert oracle.xor_unseen_probability(L // 2, L) == pytest.approx(math.exp(-0.5), abs=1e-5)


def test_conditional_entropy_regimes():
    cfg = XorExactConfig(2, 4, 4)
    assert oracle.xor_conditional_entropy(0, cfg, "diagonal") == 1.0
    assert oracle.xor_conditional_entropy(2, cfg, "diagonal") == pytest.approx(0.5625)
    assert oracle.xor_conditional_entropy(2, cfg, "data") == 1.0
    assert oracle.xor_conditional_entropy(3, cfg, "data") == 1.0
    assert oracle.xor_conditional_entropy(1, cfg, "data") == pytest.approx(0.75)
    with pytest.raises(DomainError):
        oracle.xor_conditional_entropy(4, cfg)


def test_diagonal_entropy_matches_full_enumeration():
    # L=4, t=2: three slots of (k, g, x) enumerated explicitly
    assert oracle.xor_enumerated_conditional_entropy(2, 4, 3) == pytest.approx(0.5625, abs=1e-12)
    assert oracle.xor_enumerated_conditional_entropy(2, 4, 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("T, L", [(0, 3), (1, 2), (2, 4), (3, 3)])
def test_finite_mi_matches_full_enumeration(T, L):
    exact = oracle.xor_finite_mutual_information(XorExactConfig(T, max(T, 1), L))
    assert oracle.xor_enumerated_mutual_information(T, L) == pytest.approx(exact, abs=1e-12)


def test_finite_mi_examples():
    assert oracle.xor_finite_mutual_information(XorExactConfig(0, 1, 4)) == 0.0
    assert oracle.xor_finite_mutual_information(XorExactConfig(2, 4, 4)) == pytest.approx(0.4375)
    cfg = XorExactConfig.from_params(10**5, 0.5, 1.0)
    assert oracle.xor_finite_mutual_information(cfg) == pytest.approx(1 - math.exp(-0.5), abs=1e-5)


def test_finite_mi_decreases_to_limit():
    seq = [oracle.xor_finite_mutual_information(XorExactConfig.from_params(T, 0.5, 1.0)) for T in (100, 1000, 10**4, 10**5)]
    assert all(x > y for x, y in zip(seq, seq[1:]))
    assert seq[-1] - (1 - math.exp(-0.5)) < 1e-4


@given(st.integers(1, 300), st.integers(1, 500))
def test_chain_rule(T, L):
    cfg = XorExactConfig(T, T, L)
    chain = math.fsum(oracle.xor_conditional_entropy(t, cfg, "diagonal") for t in range(T))
    assert chain == pytest.approx(oracle.xor_block_entropy(cfg), abs=1e-12)


@given(st.integers(1, 200), st.integers(0, 198))
def test_diagonal_entropy_non_increasing(L, t):
    assert oracle.xor_unseen_probability(t + 1, L) <= oracle.xor_unseen_probability(t, L)


def test_config_validation():
    with pytest.raises(ValueError):
        XorExactConfig(5, 4, 2)
    with pytest.raises(ValueError):
        XorExactConfig(1, 1, 0)


# -- pedagogical -------------------------------------------------------------------


def test_pedagogical_examples():
    T = 100
    assert oracle.pedagogical_entropy(Repetition(), T - 1, T) == 1.0
    assert oracle.pedagogical_entropy(Repetition(), T, T) == 0.0
    assert oracle.pedagogical_entropy(Oscillation(), 4, T) == 1.0
    assert oracle.pedagogical_entropy(Oscillation(), 5, T) == 0.0
    assert oracle.pedagogical_entropy(UnboundedSpike(), 47, T) == 100.0
    assert oracle.pedagogical_entropy(UnboundedSpike(), 48, T) == 1.0
    assert oracle.pedagogical_entropy(StationaryIid(0.3), 12, T) == 0.3


def test_spike_placement_for_odd_T():
    assert oracle.spike_index(101) == 47
    with pytest.raises(DomainError):
        oracle.spike_index(7)


def test_pedagogical_rejects_xor():
    with pytest.raises(ModelError):
        oracle.pedagogical_entropy(XorRandomChannel(1.0), 0, 10)


def test_block_entropy_of_repetition_saturates():
    assert oracle.pedagogical_block_entropy(Repetition(), 300, 100) == 100.0

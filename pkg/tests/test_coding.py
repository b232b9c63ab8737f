import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasetrain import coding, gf2, oracle
from phasetrain.errors import ConfigError


def _rank_by_ints(rows):
    """Independent GF(2) rank with Python integers as bit rows."""
    basis = {}
    for r in rows:
        v = int("".join(map(str, r[::-1])), 2) if len(r) else 0
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


# -- gf2 ------------------------------------------------------------------------


def test_pack_roundtrip():
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, (7, 130), dtype=np.uint8)
    assert np.array_equal(gf2.unpack_rows(gf2.pack_rows(bits), 130), bits)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 150), st.integers(1, 140), st.integers(0, 2**32 - 1))
def test_solver_agrees_with_independent_rank(n, K, seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, 2, (n, K), dtype=np.uint8)
    x = rng.integers(0, 2, K, dtype=np.uint8)
    y = (M.astype(int) @ x) % 2
    A = gf2.pack_rows(np.column_stack([M, y]))
    sol = gf2.solve_augmented(A, K)
    full = _rank_by_ints(M.tolist()) == K
    assert (sol is not None) == full
    if full:
        assert np.array_equal(sol, x)
    assert gf2.rank(M) == _rank_by_ints(M.tolist())


def test_solver_detects_inconsistency():
    M = np.array([[1, 0], [0, 1], [1, 1]], dtype=np.uint8)
    y = np.array([1, 1, 1], dtype=np.uint8)  # x = (1,1) would give 0 in the last row
    assert gf2.solve_augmented(gf2.pack_rows(np.column_stack([M, y])), 2) is None


def test_solver_large_block_structure():
    rng = np.random.default_rng(5)
    K, n = 300, 330
    M = rng.integers(0, 2, (n, K), dtype=np.uint8)
    x = rng.integers(0, 2, K, dtype=np.uint8)
    y = (M.astype(int) @ x) % 2
    sol = gf2.solve_augmented(gf2.pack_rows(np.column_stack([M, y])), K)
    assert sol is not None and np.array_equal(sol, x)


# -- encoding and decoding -----------------------------------------------------------


def test_zero_message_gives_zero_codeword():
    assert not coding.random_linear_encode(np.zeros(20, np.uint8), 123, 50).any()


def test_all_ones_row_replicates_message():
    G = gf2.pack_rows(np.ones((1, 9), np.uint8))
    assert np.array_equal(coding.encode_with([1], G, 9), np.ones(9, np.uint8))
    assert not coding.encode_with([0], G, 9).any()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_linearity(K, seed):
    rng = np.random.default_rng(seed)
    m1, m2 = rng.integers(0, 2, (2, K), dtype=np.uint8)
    c = lambda m: coding.random_linear_encode(m, seed, 64)
    assert np.array_equal(c(m1) ^ c(m2), c(m1 ^ m2))


def test_rate_exceeds_slot_budget():
    with pytest.raises(ConfigError, match="rate exceeds slot budget"):
        coding.random_linear_encode(np.zeros(10, np.uint8), 0, 9)


def test_no_erasures_invertible_generator():
    for seed in range(20):
        G = coding.generator_matrix(seed, 16, 16)
        if gf2.rank(gf2.unpack_rows(G, 16)) == 16:
            break
    msg = np.random.default_rng(1).integers(0, 2, 16, dtype=np.uint8)
    cw = coding.random_linear_encode(msg, seed, 16)
    assert np.array_equal(coding.erasure_decode(cw, np.ones(16, bool), seed, 16), msg)


def test_all_erased_fails():
    assert coding.erasure_decode(np.zeros(30, np.uint8), np.zeros(30, bool), 4, 1) is None


def test_hand_built_two_by_four():
    # G = [[1,0,1,1],[0,1,1,0]]; m = (1,1) -> c = (1,1,0,1); slot 2 erased.
    # Remaining equations: m1 = 1, m1 + m2 = 0, m1 = 1 -> m = (1,1).
    G = gf2.pack_rows(np.array([[1, 0, 1, 1], [0, 1, 1, 0]], np.uint8))
    cw = coding.encode_with([1, 1], G, 4)
    assert cw.tolist() == [1, 1, 0, 1]
    mask = np.array([True, False, True, True])
    received = np.where(mask, cw, 0)
    assert coding.decode_with(received, mask, G, 4).tolist() == [1, 1]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(60, 200), st.integers(0, 2**32 - 1))
def test_decoded_message_reencodes_to_received(K, N, seed):
    rng = np.random.default_rng(seed)
    msg = rng.integers(0, 2, K, dtype=np.uint8)
    mask = rng.random(N) < 0.6
    cw = coding.random_linear_encode(msg, seed, N)
    out = coding.erasure_decode(np.where(mask, cw, 0), mask, seed, K)
    if out is not None:
        again = coding.random_linear_encode(out, seed, N)
        assert np.array_equal(again[mask], cw[mask])


def test_generator_rows_independent_of_K():
    small = coding.generator_matrix(77, 5, 300)
    big = coding.generator_matrix(77, 50, 300)
    assert np.array_equal(small, big[:5])


# -- erasure patterns and experiments -----------------------------------------------


def test_tau_one_leaves_no_data_slots():
    assert coding.block_erasure_pattern(100, 100, 100, 0, 0, 0).size == 0


def test_single_channel_is_always_identified():
    assert coding.block_erasure_pattern(50, 5, 1, 0, 3, 2).all()


def test_unerased_fraction_matches_oracle():
    cfg = coding.CodingConfig(1000, 0.443, 1.0, 1, 0.1, 1, seed=0)
    assert (cfg.T, cfg.L) == (443, 1000)
    masks = np.stack([coding.erasure_pattern(cfg, t, 0) for t in range(400)])
    frac = masks.mean()
    per_trial = masks.mean(axis=1)
    sigma = per_trial.std(ddof=1) / math.sqrt(per_trial.size)
    exact = 1 - oracle.xor_unseen_probability(443, 1000)
    assert exact == pytest.approx(0.358035, abs=1e-6)
    assert abs(frac - exact) <= 3 * sigma


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(rate=0.6),
        dict(rate=0.0),
        dict(trials=0),
        dict(n_blocks=0),
        dict(tau=0.0),
        dict(a=0.0),
    ],
)
def test_config_errors(kwargs):
    base = dict(B=100, tau=0.443, a=1.0, n_blocks=2, rate=0.1, trials=1, seed=0)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        coding.CodingConfig(**base)


def test_small_experiment_counts():
    res = coding.run_coding_experiment(coding.CodingConfig(200, 0.4, 1.0, 5, 0.05, 10, 1))
    assert 0 <= res.errors <= res.trials == 10
    assert res.empirical_pe == res.errors / 10
    assert (res.K, res.N_c) == (50, 600)


def test_coupled_sweep_is_monotone():
    rates = [0.04, 0.10, 0.16, 0.19, 0.22, 0.26]  # capacity here is about 0.198
    out = coding.rate_sweep(200, 0.4, 1.0, 5, rates, 20, seed=2)
    pe = [r.empirical_pe for r in out]
    assert pe == sorted(pe)
    assert pe[0] == 0.0 and pe[-1] == 1.0


def test_capacity_estimate_converges():
    cfg = coding.CodingConfig(200, 0.4, 1.0, 5, 0.3, 400, seed=4)
    # rate above capacity: every trial fails on rank, but unerased counts are still tallied
    res = coding.run_coding_experiment(cfg)
    exact = (1 - 80 / 200) * (1 - oracle.xor_unseen_probability(80, 200))
    per_block = np.array(
        [coding.erasure_pattern(cfg, t, b).mean() for t in range(400) for b in range(5)]
    )
    sigma = 0.6 * per_block.std(ddof=1) / math.sqrt(per_block.size)
    assert abs(res.capacity_estimate - exact) <= 3 * sigma


def test_sub_capacity_rank_statistics():
    cfg = coding.CodingConfig(300, 0.4, 1.0, 20, 0.1, 20, seed=5)
    res = coding.run_coding_experiment(cfg)
    assert cfg.rate <= 0.8 * res.capacity_estimate
    assert res.empirical_pe <= 0.1

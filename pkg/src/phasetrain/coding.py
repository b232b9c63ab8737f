"""Random linear codes over the erasure channel left behind by one-shot training.

After T training slots the receiver knows the state of every channel it has
seen. A data slot through a seen channel is a perfect bit pipe; a slot through
an unseen channel carries a uniform input XOR an unknown uniform state, so its
output is independent of the input and the slot is treated as erased. The
receiver knows which slots those are, giving a known-erasure channel.

Generator matrices, messages and erasure patterns come from counter-based
streams keyed by ``(seed, tag, trial[, block|row])``. Row ``i`` of a
generator does not depend on K, and message bit ``i`` does not depend on K
either, so a sweep over rates with one seed is a coupled comparison: a decode
success at some rate implies success at every lower rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import gf2, streams
from .errors import ConfigError
from .models import channel_count, check_tau, robust_ceil


def _robust_floor(x: float) -> int:
    n = round(x)
    if abs(x - n) <= 1e-9 * max(1.0, abs(x)):
        return int(n)
    return math.floor(x)


@dataclass(frozen=True)
class CodingConfig:
    """One coding experiment: ``n_blocks`` channel blocks of length ``B`` per
    codeword, each starting with ``T = ceil(tau*B)`` training slots."""

    B: int
    tau: float
    a: float
    n_blocks: int
    rate: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        if int(self.B) != self.B or self.B < 1:
            raise ConfigError("B must be a positive integer")
        try:
            check_tau(self.tau)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.a > 0:
            raise ConfigError("a must be positive")
        if int(self.n_blocks) != self.n_blocks or self.n_blocks < 1:
            raise ConfigError("n_blocks must be a positive integer")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not self.rate > 0:
            raise ConfigError("rate must be positive")
        if self.K > self.N_c:
            raise ConfigError(
                f"rate {self.rate} exceeds slot budget: K={self.K} message bits, "
                f"{self.N_c} data slots (need R <= 1 - tau)"
            )

    @property
    def T(self) -> int:
        return robust_ceil(self.tau * self.B)

    @property
    def L(self) -> int:
        return channel_count(self.a, self.B)

    @property
    def data_slots(self) -> int:
        return self.B - self.T

    @property
    def N_c(self) -> int:
        return self.n_blocks * self.data_slots

    @property
    def K(self) -> int:
        return _robust_floor(self.rate * self.n_blocks * self.B)


@dataclass(frozen=True)
class CodingResult:
    empirical_pe: float
    errors: int
    trials: int
    capacity_estimate: float
    rate: float = float("nan")
    K: int = 0
    N_c: int = 0


def block_erasure_pattern(B: int, T: int, L: int, seed: int, trial: int, block: int) -> np.ndarray:
    """Unerased-slot mask (True = identified channel) over the ``B - T`` data slots."""
    key = streams.stream_key(seed, streams.CODE_ERASURE, trial, block)
    sel = streams.to_index(streams.raw(key, B), L)
    seen = np.zeros(L, dtype=bool)
    seen[sel[:T]] = True
    return seen[sel[T:]]


def erasure_pattern(cfg: CodingConfig, trial: int, block: int) -> np.ndarray:
    return block_erasure_pattern(cfg.B, cfg.T, cfg.L, cfg.seed, trial, block)


def generator_matrix(generator_seed: int, K: int, N_c: int) -> np.ndarray:
    """Packed dense uniform K x N_c generator; row i depends only on (seed, i)."""
    W = gf2.words_for(N_c)
    keys = streams.stream_key(generator_seed, streams.CODE_GENERATOR, np.arange(K, dtype=np.uint64))
    G = streams.raw(keys, W).reshape(K, W)
    tail = N_c % 64
    if tail and K:
        G[:, -1] &= np.uint64((1 << tail) - 1)
    return G


def encode_with(message: np.ndarray, G: np.ndarray, N_c: int) -> np.ndarray:
    """``message x G`` over GF(2) for a packed generator ``G``."""
    m = np.asarray(message, dtype=np.uint8).astype(bool)
    if m.size != G.shape[0]:
        raise ConfigError(f"message has {m.size} bits, generator has {G.shape[0]} rows")
    if not m.any():
        return np.zeros(N_c, dtype=np.uint8)
    word = np.bitwise_xor.reduce(G[m], axis=0)
    return gf2.unpack_rows(word[None, :], N_c)[0]


def decode_with(received: np.ndarray, mask: np.ndarray, G: np.ndarray, N_c: int) -> Optional[np.ndarray]:
    """Solve ``m G|_mask = received|_mask``; None unless the solution is unique."""
    K = G.shape[0]
    mask = np.asarray(mask, dtype=bool)
    if mask.size != N_c:
        raise ConfigError(f"mask has {mask.size} slots, expected {N_c}")
    if K == 0:
        return np.zeros(0, dtype=np.uint8)
    n_u = int(mask.sum())
    if n_u < K:
        return None
    columns = gf2.unpack_rows(G, N_c)[:, mask]
    system = np.empty((n_u, K + 1), dtype=np.uint8)
    system[:, :K] = columns.T
    system[:, K] = np.asarray(received, dtype=np.uint8)[mask] & 1
    return gf2.solve_augmented(gf2.pack_rows(system), K)


def random_linear_encode(message: np.ndarray, generator_seed: int, N_c: int) -> np.ndarray:
    """Encode a K-bit message with the seeded K x N_c random generator."""
    K = int(np.asarray(message).size)
    if K > N_c:
        raise ConfigError(f"rate exceeds slot budget: K={K} > N_c={N_c}")
    return encode_with(message, generator_matrix(generator_seed, K, N_c), N_c)


def erasure_decode(received: np.ndarray, mask: np.ndarray, generator_seed: int, K: int) -> Optional[np.ndarray]:
    """Recover the K-bit message from the unerased slots, or None on rank deficiency."""
    N_c = int(np.asarray(mask).size)
    if K > N_c:
        raise ConfigError(f"rate exceeds slot budget: K={K} > N_c={N_c}")
    return decode_with(received, mask, generator_matrix(generator_seed, K, N_c), N_c)


def trial_generator_seed(seed: int, trial: int) -> int:
    return int(streams.stream_key(seed, streams.CODE_GENERATOR, trial))


def trial_message(seed: int, trial: int, K: int) -> np.ndarray:
    key = streams.stream_key(seed, streams.CODE_MESSAGE, trial)
    return streams.to_bits(streams.raw(key, K))


def codeword_mask(cfg: CodingConfig, trial: int) -> np.ndarray:
    return np.concatenate([erasure_pattern(cfg, trial, b) for b in range(cfg.n_blocks)])


def run_coding_experiment(cfg: CodingConfig) -> CodingResult:
    """Count block errors of random linear codes over ``cfg.trials`` trials.

    ``capacity_estimate`` is (1 - tau) times the empirical fraction of
    unerased data slots, measured over all trials.
    """
    K, N_c = cfg.K, cfg.N_c
    errors = 0
    unerased = 0
    for trial in range(cfg.trials):
        mask = codeword_mask(cfg, trial)
        n_u = int(mask.sum())
        unerased += n_u
        if n_u < K:
            # fewer equations than unknowns: rank deficient without looking
            errors += 1
            continue
        G = generator_matrix(trial_generator_seed(cfg.seed, trial), K, N_c)
        message = trial_message(cfg.seed, trial, K)
        received = encode_with(message, G, N_c)
        decoded = decode_with(received, mask, G, N_c)
        if decoded is None or not np.array_equal(decoded, message):
            errors += 1
    fraction = unerased / (cfg.trials * N_c) if N_c else 0.0
    capacity = (cfg.data_slots / cfg.B) * fraction
    return CodingResult(errors / cfg.trials, errors, cfg.trials, capacity, cfg.rate, K, N_c)


def rate_sweep(
    B: int, tau: float, a: float, n_blocks: int, rates: Sequence[float], trials: int, seed: int = 0
) -> List[CodingResult]:
    """One coupled experiment per rate: every rate reuses the same seed, so
    erasure patterns and generator rows are shared."""
    configs = [CodingConfig(B, tau, a, n_blocks, float(r), trials, seed) for r in rates]
    return [run_coding_experiment(c) for c in configs]

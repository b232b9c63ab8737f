"""Seeded Monte Carlo for the XOR random-channel model.

Each trial draws from its own counter-based streams addressed by
``(seed, stream tag, trial index)``, so any subset of trials can be generated
in any order or batch size with bit-identical results. Estimators aggregate
integer counts, which keeps the reduction exact and order-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from . import streams
from .errors import ConfigError, DomainError
from .models import GainDistribution, ScalarGainChannel, SimConfig

# Below this many trials the 3-sigma normal interval is not trustworthy.
MIN_TRIALS_FOR_CI = 10_000
_BATCH_WORDS = 1 << 22


@dataclass(frozen=True)
class Trajectory:
    """One block of the XOR model; ``selections`` are 0-based channel indices."""

    inputs: np.ndarray
    selections: np.ndarray
    states: np.ndarray
    outputs: np.ndarray


@dataclass(frozen=True)
class Estimate:
    mean: float
    ci_half_width: float
    trials: int

    @property
    def ci_low(self) -> float:
        return self.mean - self.ci_half_width

    @property
    def ci_high(self) -> float:
        return self.mean + self.ci_half_width

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high


def _estimate_from_sums(total: int, total_sq: int, n: int) -> Estimate:
    mean = total / n
    if n < 2:
        return Estimate(mean, 0.0, n)
    # integer sums make the variance exact up to the final division
    var = (total_sq - total * total / n) / (n - 1)
    return Estimate(mean, 3.0 * math.sqrt(max(var, 0.0) / n), n)


def simulate_trajectory(cfg: SimConfig, trial_index: int) -> Trajectory:
    """Draw channel states, selections and inputs for one trial.

    Training inputs are fixed to 0; data inputs are uniform bits.
    """
    if trial_index < 0:
        raise DomainError("trial_index must be non-negative")
    B, L, T = cfg.B, cfg.L, cfg.T
    sel_key = streams.stream_key(cfg.seed, streams.SELECTIONS, trial_index)
    selections = streams.to_index(streams.raw(sel_key, B), L)
    states = streams.to_bits(streams.raw(streams.stream_key(cfg.seed, streams.STATES, trial_index), L))
    inputs = streams.to_bits(streams.raw(streams.stream_key(cfg.seed, streams.INPUTS, trial_index), B))
    inputs[:T] = 0
    outputs = inputs ^ states[selections]
    return Trajectory(inputs, selections, states, outputs)


def selection_batches(cfg: SimConfig, columns: int) -> Iterator[np.ndarray]:
    """Yield ``(batch, columns)`` arrays of the first ``columns`` selections of
    every trial, in trial order. Row ``i`` equals the prefix of
    ``simulate_trajectory(cfg, i).selections``."""
    L = cfg.L
    per_batch = max(1, _BATCH_WORDS // max(columns, 1))
    for start in range(0, cfg.trials, per_batch):
        idx = np.arange(start, min(start + per_batch, cfg.trials), dtype=np.uint64)
        keys = streams.stream_key(cfg.seed, streams.SELECTIONS, idx)
        yield streams.to_index(streams.raw(keys, columns), L)


def _seen_before(sel: np.ndarray, t: int) -> np.ndarray:
    if t == 0:
        return np.zeros(sel.shape[0], dtype=bool)
    return (sel[:, :t] == sel[:, t : t + 1]).any(axis=1)


def estimate_unseen_probability(cfg: SimConfig, t: int) -> Estimate:
    """Fraction of trials whose slot-(t+1) channel is absent from slots 1..t."""
    if not 0 <= t < cfg.B:
        raise DomainError(f"need 0 <= t < B={cfg.B}")
    hits = 0
    for sel in selection_batches(cfg, t + 1):
        hits += int(np.count_nonzero(~_seen_before(sel, t)))
    return _estimate_from_sums(hits, hits, cfg.trials)


def estimate_distinct_channels(cfg: SimConfig, t: int) -> Estimate:
    """Mean number of distinct channels among the first ``t`` selections."""
    if not 1 <= t <= cfg.B:
        raise DomainError(f"need 1 <= t <= B={cfg.B}")
    total = total_sq = 0
    for sel in selection_batches(cfg, t):
        s = np.sort(sel, axis=1)
        distinct = 1 + np.count_nonzero(np.diff(s, axis=1), axis=1)
        total += int(distinct.sum())
        total_sq += int((distinct * distinct).sum())
    return _estimate_from_sums(total, total_sq, cfg.trials)


def estimate_data_phase_mi(cfg: SimConfig, training: int = None) -> Estimate:
    """Empirical I(x_{T+1}; y_{T+1} | training), in bits.

    Once its channel has been seen in training a data slot is a noiseless bit
    pipe (1 bit), otherwise the output is independent of the input (0 bits),
    so the estimate is the fraction of trials whose first data slot uses a
    channel seen during training. ``training`` overrides ``cfg.T``.
    """
    T = cfg.T if training is None else int(training)
    if T == 0:
        return Estimate(0.0, 0.0, cfg.trials)
    if not 0 < T < cfg.B:
        raise ConfigError(f"need a data slot after training: T={T}, B={cfg.B}")
    hits = 0
    for sel in selection_batches(cfg, T + 1):
        hits += int(np.count_nonzero(_seen_before(sel, T)))
    return _estimate_from_sums(hits, hits, cfg.trials)


def estimate_gain_expectation(
    gains_dist: Union[ScalarGainChannel, GainDistribution, Sequence[float]],
    samples: int,
    seed: int = 0,
) -> Estimate:
    """Sample mean of log2(1 + g^2) with a 3-sigma interval.

    Explicit gains are used as given (``samples`` is ignored); a normal
    distribution is sampled ``samples`` times from a stream keyed by ``seed``.
    """
    if isinstance(gains_dist, ScalarGainChannel):
        gains_dist = gains_dist.gains if gains_dist.gains is not None else gains_dist.distribution
    if isinstance(gains_dist, GainDistribution):
        if gains_dist.name != "normal":
            raise ConfigError(f"unsupported gain distribution {gains_dist.name!r}")
        if samples < 1:
            raise ConfigError("samples must be positive")
        key = int(streams.stream_key(seed, 21))
        rng = np.random.Generator(np.random.PCG64(key))
        g = gains_dist.mean + gains_dist.std * rng.standard_normal(samples)
    else:
        g = np.asarray(gains_dist, dtype=float)
        if g.size == 0:
            raise ConfigError("no gains")
    values = np.log2(1.0 + g * g)
    n = values.size
    mean = float(values.mean())
    half = 3.0 * float(values.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return Estimate(mean, half, n)

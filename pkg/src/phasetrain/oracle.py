"""Exact finite-T entropies for the XOR random-channel model and the
pedagogical processes.

Nothing here takes a limit: these are the ground-truth values the analytic
limits and the Monte Carlo estimates are compared against.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .errors import ConfigError, DomainError, EnumerationTooLarge, ModelError
from .models import (
    ModelSpec,
    Oscillation,
    Repetition,
    StationaryIid,
    UnboundedSpike,
    XorRandomChannel,
    blocklength,
    channel_count,
)

ENUMERATION_BUDGET = 10**6


@dataclass(frozen=True)
class XorExactConfig:
    """Training length T, blocklength B and channel count L."""

    T: int
    B: int
    L: int

    def __post_init__(self):
        for name in ("T", "B", "L"):
            v = getattr(self, name)
            if int(v) != v:
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if self.T < 0 or self.B < 1 or self.L < 1:
            raise ConfigError("need T >= 0, B >= 1 and L >= 1")
        if self.T > self.B:
            raise ConfigError(f"training length {self.T} exceeds blocklength {self.B}")

    @classmethod
    def from_params(cls, T: int, tau: float, a: float) -> "XorExactConfig":
        B = blocklength(T, tau)
        return cls(T, B, channel_count(a, B))


def xor_unseen_probability(t: int, L: int) -> float:
    """(1 - 1/L)^t: probability that the channel used at slot t+1 was not
    used in slots 1..t."""
    if t < 0 or L < 1:
        raise DomainError("need t >= 0 and L >= 1")
    if t == 0:
        return 1.0
    if L == 1:
        return 0.0
    return math.exp(t * math.log1p(-1.0 / L))


def xor_block_entropy(cfg: XorExactConfig, exact: bool = False):
    """H(y^T | x^T) = E|A_T| = L (1 - (1 - 1/L)^T), the expected number of
    distinct channels among T uniform draws.

    With ``exact=True`` the value is a Fraction.
    """
    if exact:
        return cfg.L * (1 - (1 - Fraction(1, cfg.L)) ** cfg.T)
    return cfg.L * (1.0 - xor_unseen_probability(cfg.T, cfg.L))


def xor_block_entropy_bruteforce(cfg: XorExactConfig) -> Fraction:
    """Average of |{k_1..k_T}| over all L^T equally likely selection sequences."""
    count = cfg.L**cfg.T
    if count > ENUMERATION_BUDGET:
        raise EnumerationTooLarge(f"enumeration too large: L^T = {count}")
    total = sum(len(set(seq)) for seq in itertools.product(range(cfg.L), repeat=cfg.T))
    return Fraction(total, count)


def xor_conditional_entropy(t: int, cfg: XorExactConfig, regime: str = "diagonal") -> float:
    """Exact H(y_{t+1} | y^t, known inputs), in bits.

    ``diagonal``: inputs known through slot t+1; the output is uncertain only
    when its channel has not been seen, so the entropy is (1 - 1/L)^t.
    ``data``: inputs known through the training phase only; past training the
    unknown uniform input makes the output a uniform bit.
    """
    if not 0 <= t < cfg.B:
        raise DomainError(f"need 0 <= t < B={cfg.B}, got {t}")
    if regime == "diagonal":
        return xor_unseen_probability(t, cfg.L)
    if regime == "data":
        return 1.0 if t >= cfg.T else xor_unseen_probability(t, cfg.L)
    raise ValueError(f"unknown regime {regime!r}")


def xor_finite_mutual_information(cfg: XorExactConfig) -> float:
    """I(x_{T+1}; y_{T+1} | x^T, y^T) = 1 - (1 - 1/L)^T."""
    return 1.0 - xor_unseen_probability(cfg.T, cfg.L)


# -- full joint enumeration (independent cross-check) ----------------------


def _entropy_from_counts(counts: Counter, total: int) -> float:
    return math.log2(total) - math.fsum(c * math.log2(c) for c in counts.values()) / total


def xor_enumerated_conditional_entropy(t: int, L: int, known_inputs: int) -> float:
    """H(y_{t+1} | k^{t+1}, x^{known_inputs}, y^t) by enumerating every
    (k, g, x) configuration with t+1 slots.

    ``known_inputs = t + 1`` is the diagonal regime; ``known_inputs = T <= t``
    is the data regime.
    """
    n = t + 1
    size = L**n * 2**L * 2**n
    if size > ENUMERATION_BUDGET:
        raise EnumerationTooLarge(f"enumeration too large: {size} configurations")
    if not 0 <= known_inputs <= n:
        raise DomainError("known_inputs must lie in [0, t+1]")
    with_y = Counter()
    without_y = Counter()
    for ks in itertools.product(range(L), repeat=n):
        for gs in itertools.product((0, 1), repeat=L):
            for xs in itertools.product((0, 1), repeat=n):
                ys = tuple(x ^ gs[k] for x, k in zip(xs, ks))
                cond = (ks, xs[:known_inputs], ys[:t])
                with_y[cond + (ys[t],)] += 1
                without_y[cond] += 1
    return _entropy_from_counts(with_y, size) - _entropy_from_counts(without_y, size)


def xor_enumerated_mutual_information(T: int, L: int) -> float:
    """I(x_{T+1}; y_{T+1} | k^{T+1}, x^T, y^T) by full enumeration."""
    return xor_enumerated_conditional_entropy(T, L, T) - xor_enumerated_conditional_entropy(T, L, T + 1)


# -- pedagogical processes -------------------------------------------------


def spike_index(T: int) -> int:
    """Position t of the unbounded per-symbol entropy, floor(T/2) - 3."""
    if T < 8:
        raise DomainError("the spike process needs T >= 8")
    return T // 2 - 3


def pedagogical_entropy(model: ModelSpec, t: int, T: int) -> float:
    """Exact per-symbol conditional entropy H(y_{t+1} | y^t)."""
    if t < 0:
        raise DomainError("t must be non-negative")
    if isinstance(model, Repetition):
        return 1.0 if t < T else 0.0
    if isinstance(model, Oscillation):
        return 1.0 if t % 2 == 0 else 0.0
    if isinstance(model, UnboundedSpike):
        return float(T) if t == spike_index(T) else 1.0
    if isinstance(model, StationaryIid):
        return float(model.h)
    raise ModelError(f"no per-symbol entropy law for {model!r}")


def pedagogical_entropies(model: ModelSpec, T: int, t_stop: int) -> List[Tuple[int, float]]:
    """``[(t, H(y_{t+1} | y^t)) for t in range(t_stop)]``."""
    return [(t, pedagogical_entropy(model, t, T)) for t in range(t_stop)]


def pedagogical_block_entropy(model: ModelSpec, n: int, T: int) -> float:
    """H(y^n) by the chain rule over the exact per-symbol entropies."""
    return math.fsum(pedagogical_entropy(model, t, T) for t in range(n))


def limit_per_symbol_entropy(model: ModelSpec, u: float, tau: float = None, regime: str = "data") -> float:
    """Large-T limit of the per-symbol entropy at offset ``u``.

    The oscillating process has no such limit; its window average 1/2 is
    returned. The unbounded spike contributes an impulse that is left out.
    """
    if isinstance(model, StationaryIid):
        return float(model.h)
    if isinstance(model, Repetition):
        return 1.0 if u < 0 else 0.0
    if isinstance(model, Oscillation):
        return 0.5
    if isinstance(model, UnboundedSpike):
        return 1.0
    if isinstance(model, XorRandomChannel):
        if tau is None:
            raise DomainError("the XOR law needs tau")
        diag = math.exp(-(tau / model.a) * (1.0 + u))
        if regime == "diagonal" or u < 0:
            return diag
        if regime == "data":
            return 1.0
        raise ValueError(f"unknown regime {regime!r}")
    raise ModelError(f"no limiting per-symbol law for {model!r}")

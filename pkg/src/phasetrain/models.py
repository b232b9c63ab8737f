"""Shared model types, parameter checks and the built-in model registry.

Entropies are in bits throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from .errors import ConfigError, DomainError, ModelError

# Relative slack used when rounding ratios that should be integers up to the
# next integer; 10/0.1 must give 100, not 101.
_CEIL_SLACK = 1e-9


def robust_ceil(x: float) -> int:
    """Ceiling that ignores floating-point noise just above an integer."""
    if not math.isfinite(x):
        raise DomainError(f"cannot take ceiling of {x!r}")
    nearest = round(x)
    if abs(x - nearest) <= _CEIL_SLACK * max(1.0, abs(x)):
        return int(nearest)
    return math.ceil(x)


def check_tau(tau: float) -> float:
    """Validate a training fraction, 0 < tau <= 1."""
    tau = float(tau)
    if not (0.0 < tau <= 1.0):
        raise DomainError(f"training fraction must satisfy 0 < tau <= 1, got {tau!r}")
    return tau


def check_eps(eps: float, tau: Optional[float] = None) -> float:
    """Validate a phase offset: eps >= -1 and, given tau, eps <= 1/tau - 1."""
    eps = float(eps)
    if not eps >= -1.0:
        raise DomainError(f"phase offset must satisfy eps >= -1, got {eps!r}")
    if tau is not None and eps > 1.0 / check_tau(tau) - 1.0 + 1e-12:
        raise DomainError(f"phase offset {eps!r} exceeds 1/tau - 1 for tau={tau!r}")
    return eps


def blocklength(T: int, tau: float) -> int:
    """Blocklength B = ceil(T / tau) for T training symbols."""
    if int(T) != T or T < 1:
        raise DomainError(f"training length must be a positive integer, got {T!r}")
    return robust_ceil(int(T) / check_tau(tau))


def channel_count(a: float, B: int) -> int:
    """Number of distinct XOR channels, L = ceil(a * B), at least 1."""
    return max(1, robust_ceil(a * B))


# -- model registry ---------------------------------------------------------


@dataclass(frozen=True)
class XorRandomChannel:
    """Bit flipping through one of ``ceil(a*B)`` randomly selected channels."""

    a: float


@dataclass(frozen=True)
class GainDistribution:
    """Named gain distribution; only ``normal`` is supported."""

    name: str = "normal"
    mean: float = 0.0
    std: float = 1.0


@dataclass(frozen=True)
class ScalarGainChannel:
    """y = g x + v with an unknown scalar gain g.

    Give either explicit ``gains`` draws or a ``distribution``.
    """

    gains: Optional[Tuple[float, ...]] = None
    distribution: Optional[GainDistribution] = None


@dataclass(frozen=True)
class StationaryIid:
    """Stationary process with entropy rate ``h``; inputs play no role."""

    h: float


@dataclass(frozen=True)
class Repetition:
    """iid unit-entropy bits for the first T symbols, then repeats of them."""


@dataclass(frozen=True)
class Oscillation:
    """Each unit-entropy bit emitted twice: b1, b1, b2, b2, ..."""


@dataclass(frozen=True)
class UnboundedSpike:
    """Independent unit-entropy symbols except one symbol with entropy T."""


ModelSpec = Union[
    XorRandomChannel,
    ScalarGainChannel,
    StationaryIid,
    Repetition,
    Oscillation,
    UnboundedSpike,
]

PEDAGOGICAL = (StationaryIid, Repetition, Oscillation, UnboundedSpike)

_NAMES = {
    XorRandomChannel: "xor",
    ScalarGainChannel: "scalar_gain",
    StationaryIid: "iid",
    Repetition: "repetition",
    Oscillation: "oscillation",
    UnboundedSpike: "spike",
}


def model_name(model: ModelSpec) -> str:
    return _NAMES[type(model)]


def validate_model(spec: ModelSpec) -> ModelSpec:
    """Return ``spec`` unchanged, or raise ModelError on the first bad field."""
    if isinstance(spec, XorRandomChannel):
        if not (math.isfinite(spec.a) and spec.a > 0):
            raise ModelError("a must be positive")
    elif isinstance(spec, StationaryIid):
        if not (math.isfinite(spec.h) and spec.h >= 0):
            raise ModelError("h must be non-negative")
    elif isinstance(spec, ScalarGainChannel):
        if spec.gains is not None:
            if len(spec.gains) == 0:
                raise ModelError("no gains")
            if not all(math.isfinite(g) for g in spec.gains):
                raise ModelError("gains must be finite")
        elif spec.distribution is not None:
            d = spec.distribution
            if d.name != "normal":
                raise ModelError(f"unsupported gain distribution {d.name!r}")
            if not (math.isfinite(d.mean) and math.isfinite(d.std) and d.std >= 0):
                raise ModelError("normal gain distribution needs finite mean and std >= 0")
        else:
            raise ModelError("no gains")
    elif not isinstance(spec, (Repetition, Oscillation, UnboundedSpike)):
        raise ModelError(f"unknown model {spec!r}")
    return spec


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo configuration for the XOR random-channel model."""

    T: int
    tau: float
    a: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ConfigError(f"T must be a positive integer, got {self.T!r}")
        try:
            check_tau(self.tau)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if not (math.isfinite(self.a) and self.a > 0):
            raise ConfigError("a must be positive")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def B(self) -> int:
        return blocklength(self.T, self.tau)

    @property
    def L(self) -> int:
        return channel_count(self.a, self.B)

"""Entropy phase transitions and the value of one-shot training."""

__version__ = "0.1.0"

from .analytic import (
    bound_chain,
    entropy_surface,
    h_prime_data,
    h_prime_diag,
    integral_consistency,
    one_shot_mutual_information,
    optimize_tau,
    scale_surface,
    tabulate_curves,
)
from .coding import CodingConfig, CodingResult, run_coding_experiment
from .models import (
    GainDistribution,
    Oscillation,
    Repetition,
    ScalarGainChannel,
    SimConfig,
    StationaryIid,
    UnboundedSpike,
    XorRandomChannel,
    validate_model,
)

__all__ = [
    "CodingConfig",
    "CodingResult",
    "GainDistribution",
    "Oscillation",
    "Repetition",
    "ScalarGainChannel",
    "SimConfig",
    "StationaryIid",
    "UnboundedSpike",
    "XorRandomChannel",
    "bound_chain",
    "entropy_surface",
    "h_prime_data",
    "h_prime_diag",
    "integral_consistency",
    "one_shot_mutual_information",
    "optimize_tau",
    "run_coding_experiment",
    "scale_surface",
    "tabulate_curves",
    "validate_model",
]

"""Finite training lengths against the large-T limit, exactly and by simulation.

The exact oracle counts distinct channels; the Monte Carlo replays the
process with counter-based random streams. Both should approach the limit
1 - e^{-tau/a} from above as T grows.
"""

import math

from phasetrain import montecarlo, oracle
from phasetrain.models import SimConfig

tau, a = 0.5, 1.0
limit = 1 - math.exp(-tau / a)
print(f"limit 1 - e^(-tau/a) = {limit:.8f}")
print(f"{'T':>7} {'exact MI':>11} {'MC mean':>11} {'3-sigma':>9}")
for T in (2, 10, 100, 1000):
    cfg = SimConfig(T, tau, a, trials=20_000, seed=0)
    exact = oracle.xor_finite_mutual_information(oracle.XorExactConfig(T, cfg.B, cfg.L))
    est = montecarlo.estimate_data_phase_mi(cfg)
    print(f"{T:7d} {exact:11.8f} {est.mean:11.6f} {est.ci_half_width:9.6f}")

for T in (10**4, 10**5):
    exact = oracle.xor_finite_mutual_information(oracle.XorExactConfig.from_params(T, tau, a))
    print(f"{T:7d} {exact:11.8f}")

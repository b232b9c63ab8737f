"""Four processes that probe when entropy can be recovered from its derivative.

Repetition has a kink but the integral relation holds. Oscillation has no
per-symbol limit, yet a window average recovers 1/2. The spike process hides
T bits in a single symbol, so the integral misses exactly one bit.
"""

import numpy as np

from phasetrain import analytic, oracle
from phasetrain.models import Oscillation, Repetition, StationaryIid, UnboundedSpike

T, tau = 1000, 0.5
for model in (StationaryIid(1.0), Repetition(), Oscillation(), UnboundedSpike()):
    F = analytic.entropy_surface(model)
    ent = oracle.pedagogical_entropies(model, T, 2 * T)
    avg = analytic.averaged_h_prime(ent, T, 0.5, 0.1)
    res = [analytic.integral_consistency(F, tau, e, model) for e in np.linspace(-0.9, 1.0, 20)]
    at0 = analytic.integral_consistency(F, tau, 0.0, model)
    print(f"{F.name:>11}: averaged H' at eps=0.5 = {avg:.3f}, "
          f"integral residual at 0 = {at0:.3g}, max over grid = {max(res):.3g}")

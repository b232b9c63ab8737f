"""How much of each block should be spent on training?

More training identifies more channels, but leaves fewer slots for data.
The product (1 - tau) I(tau) has an interior maximum whose location moves
from -a ln a for sparse channel sets to 1/2 for very rich ones.
"""

import math

from phasetrain import analytic
from phasetrain.models import XorRandomChannel

print(f"{'a':>10} {'tau_opt':>10} {'R_opt':>10} {'reference':>10}")
for a in (0.001, 0.01, 0.1, 1 / math.e, 1.0, 10.0, 100.0, 1000.0):
    res = analytic.optimize_tau(XorRandomChannel(a))
    ref = analytic.asymptotic_tau_reference(a)
    ref_s = f"{ref:10.6f}" if ref is not None else f"{'-':>10}"
    print(f"{a:10.4g} {res.tau_opt:10.6f} {res.r_opt:10.6f} {ref_s}")

print()
print("a = 1/e is the exact case: tau_opt = 1/e, R_opt = (1 - 1/e)^2 =", (1 - 1 / math.e) ** 2)

"""The jump in the per-symbol entropy when training stops.

During training every output is explained by a known input, so each new
symbol only adds uncertainty when it lands on a channel nobody has looked at
yet. Once the inputs become unknown, every output is a fresh uniform bit. The
size of that jump is the information one training phase buys.
"""

import math

import numpy as np

from phasetrain import analytic
from phasetrain.models import XorRandomChannel

a, tau = 1.0, 0.5
F = analytic.entropy_surface(XorRandomChannel(a))

grid = np.linspace(-0.5, 1.0, 7)
curves = analytic.tabulate_curves(F, tau, grid)
print(f"XOR model, a={a}, tau={tau}")
print(f"{'eps':>6} {'H data':>9} {'H diag':>9} {'dH data':>9} {'dH diag':>9}")
for row in zip(curves.eps_grid, curves.h_data, curves.h_diag, curves.hprime_data, curves.hprime_diag):
    print("{:6.2f} {:9.5f} {:9.5f} {:9.5f} {:9.5f}".format(*row))

limits = analytic.phase_limits(F, tau)
print()
print(f"right limit of dH data : {limits.hprime_data:.8f}")
print(f"right limit of dH diag : {limits.hprime_diag:.8f}")
print(f"gap (one-shot MI)      : {limits.gap:.8f}")
print(f"closed form 1-e^-tau/a : {1 - math.exp(-tau / a):.8f}")
print(f"rate bound (1-tau) I   : {analytic.lower_bound_rate(F, tau):.8f}")

"""Random linear codes over the channel that training leaves behind.

Slots whose channel was seen in training are perfect; the rest are erasures
the receiver can flag. Below the rate (1 - tau) I the decoder almost always
recovers the message, above it almost never. This takes about 20 seconds.
"""

import math

from phasetrain import coding

B, tau, a, n_blocks, trials = 1000, 0.443, 1.0, 20, 50
bound = (1 - tau) * (1 - math.exp(-tau / a))
print(f"B={B}, tau={tau}, a={a}, {n_blocks} blocks per codeword, {trials} trials")
print(f"rate bound (1 - tau)(1 - e^(-tau/a)) = {bound:.4f}")
print(f"{'R':>6} {'K':>6} {'errors':>7} {'pe':>6} {'capacity':>9}")
for r in coding.rate_sweep(B, tau, a, n_blocks, [0.16, 0.19, 0.20, 0.21, 0.24], trials, seed=0):
    print(f"{r.rate:6.2f} {r.K:6d} {r.errors:7d} {r.empirical_pe:6.2f} {r.capacity_estimate:9.5f}")

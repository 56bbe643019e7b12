"""Walk through factoring 15 on the simulator.

Run with ``python demos/factor_fifteen.py``.
"""

import numpy as np

from shorsim import shor
from shorsim.contfrac import extract_period, format_trace
from shorsim.modexp import full_me_permutation, order_bruteforce

N = 15
M_BITS = 9

# Every base coprime to 15, with its order and what the order check says.
print("base  order  outcome")
for a in (2, 4, 7, 8, 11, 13, 14):
    report = shor.run(shor.ShorConfig(N=N, a=a, m=M_BITS))
    outcome = "x".join(map(str, report.outcome.factors)) if report.outcome.success else "no factors"
    print(f"{a:>4}  {order_bruteforce(a, N):>5}  {outcome}")

# The operator for a = 8 is just a permutation of basis states.
perm = full_me_permutation(8, N, 4)
print("\nU|w> for a=8:", {w: perm(w) for w in range(1, N)})

# With a = 8 the order is 4, so the readout is four sharp spikes.
probs = shor.simulated_histogram(8, N, 5)
print("\nm=5 histogram for a=8:")
print(shor.ascii_histogram(probs, 5, width=40))

# Shift every peak by one in the last bit and see which still recover r = 4.
peaks = np.flatnonzero(shor.simulated_histogram(8, N, M_BITS) > 1e-9)
print("\nm=9 peaks:", peaks.tolist())
for ell in peaks:
    noisy = shor.inject_lsb_error(int(ell), M_BITS)
    ex = extract_period(noisy, M_BITS, 8, N)
    print(f"  {ell:>3} -> {noisy:>3}: " + (f"r = {ex.r}, factors {ex.factors}" if ex.succeeded else "nothing"))

print("\nfull trace for 385:\n")
print(format_trace(extract_period(385, M_BITS, 8, N)))

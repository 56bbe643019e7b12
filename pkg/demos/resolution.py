"""How many control qubits are enough? N = 143 and N = 247.

Each useful phase s/r lands near M*s/r. When M is too small, neighbouring
fractions share a bin and continued fractions stop finding r.

Run with ``python demos/resolution.py``.
"""

import math
from fractions import Fraction

from shorsim import shor
from shorsim.contfrac import extract_period
from shorsim.modexp import order_bruteforce


def survey(a, N, m):
    r = order_bruteforce(a, N)
    M = 1 << m
    probs = shor.simulated_histogram(a, N, m)
    dominant = set(shor.dominant_peaks(probs))
    print(f"N={N}, a={a}, r={r}, m={m}")
    for s in (s for s in range(1, r) if math.gcd(s, r) == 1):
        ell = round(Fraction(M * s, r))
        ex = extract_period(ell, m, a, N)
        tag = "dominant" if ell in dominant else "        "
        found = f"r = {ex.r}, factors {ex.factors}" if ex.succeeded else "no period"
        print(f"  s={s:>2}  ell={ell:>4}  p={probs[ell]:.4f}  {tag}  {found}")
    print()


for m in (8, 9):
    survey(5, 143, m)
for m in (9, 10):
    survey(2, 247, m)

"""Compare the three ways of building the controlled powers of U.

Version 0 multiplies the full permutation. Version 1 keeps only a few cycles
of each power. Version 2 keeps fewer still. The readout barely changes.

Run with ``python demos/cycle_operators.py``.
"""

import numpy as np

from shorsim import shor
from shorsim.modexp import MEVersion, make_me_spec

CASES = [(2, 21, 5), (4, 35, 5), (7, 33, 6), (5, 143, 8)]

for a, N, m in CASES:
    print(f"N={N}, a={a}, m={m}")
    for p in (1, 2, 4):
        for version in (MEVersion.PER_POWER_CYCLES, MEVersion.TRUNCATED):
            spec = make_me_spec(a, N, p, version)
            print(f"  U^{p:<2} v{int(version)}: " + " ".join(str(list(c)) for c in spec.cycles))

    theory = shor.theoretical_histogram(a, N, m)
    for version in MEVersion:
        probs = shor.simulated_histogram(a, N, m, version)
        report = shor.run(shor.ShorConfig(N=N, a=a, m=m, me_version=version))
        print(
            f"  v{int(version)}: max |sim - theory| = {np.abs(probs - theory).max():.1e}, "
            f"dominant = {shor.dominant_peaks(probs)}, factors = {report.outcome.factors}"
        )
    print()

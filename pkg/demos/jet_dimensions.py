"""Point counts on the jet schemes of x^3 + y^3 for a few primes.

The count at m = 0 tracks q^2.  At m = 1 it tracks q^4, two powers below the
general bound q^6, so the normalized ratios drift with q.

Run: python3 demos/jet_dimensions.py
"""

from jetcircle import FiniteField, FormSpec
from jetcircle.counting import count_jet_variety, jet_dim_bound

for m in (0, 1):
    B = jet_dim_bound(2, 3, m)
    print(f"m={m}, B={B}")
    for q in (5, 7, 11):
        count = count_jet_variety(FormSpec.diagonal(FiniteField(q), [1, 1], 3), m)
        print(f"  q={q:>2}: {count:>7}  /q^B = {count / q**B:.4f}  /q^{2 * (m + 1)} = {count / q ** (2 * (m + 1)):.4f}")

"""Count jets on x^3 + y^3 two ways and watch them agree.

Run: python3 demos/keystone_count.py
"""

from jetcircle import FiniteField, FormSpec, count_direct_Nm, count_via_characters, exp_sum_S, SumJob
from jetcircle.jets import parse_jetlaurent

F5 = FiniteField(5)
F = FormSpec.diagonal(F5, [1, 1], 3)

# direct count: walk the box of x with deg_t x <= e and reduce mod s^(m+1)
for e, m in [(0, 0), (1, 0), (0, 1)]:
    direct = count_direct_Nm(F, e, m)
    chars = count_via_characters(F, e, m)
    print(f"e={e} m={m}: direct {direct.value:>5}  characters {chars.value:>5}")

# one exponential sum, held exactly as a combination of 5th roots of unity
alpha = parse_jetlaurent(F5, 0, "t^-1 + 2*t^-3", -4)
S = exp_sum_S(SumJob(F, 1, 0, alpha))
print("S(alpha) root counts:", S.counts, " |S| =", round(S.magnitude(), 6))

"""Weyl differencing and the shrinking inequality on random inputs.

Run: python3 demos/weyl_and_shrinking.py
"""

import numpy as np

from jetcircle import FiniteField, FormSpec
from jetcircle.expsums import check_shrinking, check_weyl_lemma, random_alpha, random_linear_system

F5 = FiniteField(5)
F = FormSpec.diagonal(F5, [1, 2], 3)
rng = np.random.default_rng(7)

worst = 0.0
for _ in range(25):
    rep = check_weyl_lemma(F, random_alpha(F5, 0, 4, rng), 1, 0)
    assert rep.passed
    if rep.rhs:
        worst = max(worst, rep.lhs / rep.rhs)
print(f"25 alphas, largest |S|^4 / bound = {worst:.4g}")

L = random_linear_system(F5, 2, 1, 6, rng)
for a, b, r in [(2, 2, 1), (3, 3, 2), (2, 3, 1)]:
    rep = check_shrinking(L, a, b, r, 1)
    print(f"K(a={a}, b={b}) = {rep.lhs} <= {rep.rhs}")

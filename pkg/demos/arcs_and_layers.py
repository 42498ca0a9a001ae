"""Major arcs at q = 5, d = 3, e = 1, and how the circle integral splits across them.

Run: python3 demos/arcs_and_layers.py
"""

import numpy as np

from jetcircle import FiniteField, FormSpec
from jetcircle.arcs import ArcParams, arc_measure_count, layer_report, layer_table

F5 = FiniteField(5)
params = ArcParams(3, 1)
print(f"M = {params.M}, digit depth = {params.depth}")

table = layer_table(F5, params)
print("alpha_0 classes by minimal J:", np.bincount(table).tolist())
for J in range(params.M + 1):
    rep = arc_measure_count(F5, J, params, 0)
    print(f"  J={J}: measure {rep.measure} vs bound {rep.bound}")

# x^3 at m = 1: the layers add up to N_1(1) = 25
rows, total = layer_report(FormSpec.diagonal(F5, [1], 3), 1, 1)
for r in rows:
    print(f"  layer {r.J:>2}: {r.class_count:>7} classes, contributes {r.integral_contribution}")
print("total:", total.value)

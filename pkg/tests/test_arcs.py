import itertools
from fractions import Fraction

import numpy as np
import pytest

from jetcircle import batch
from jetcircle.arcs import (
    AlphaRep,
    ArcParams,
    alpha0_classes,
    arc_measure_count,
    arc_member,
    arc_witness,
    circle_integral,
    dirichlet_layer,
    layer_report,
    layer_table,
    monic_polys,
)
from jetcircle.counting import count_direct_Nm
from jetcircle.errors import BudgetExceeded, InsufficientPrecision
from jetcircle.field import FiniteField
from jetcircle.forms import parse_form
from jetcircle.jets import JetLaurent, parse_jetlaurent

F5 = FiniteField(5)
F3 = FiniteField(3)
CUBIC = ArcParams(3, 1)
CUBE = parse_form("diag:1", F5, d=3)


def ref_member(digits, J, d, e, p):
    """Search monic r of degree <= J with plain integer arithmetic mod p.

    digits[j-1] is the coefficient of t^-j in alpha_0; the coefficient of t^-u in
    alpha_0 r is sum_k r_k a_{u+k}.
    """
    if J < 0:
        return False
    b = d * e + 1 - J
    if b <= 0:
        return True
    for deg in range(J + 1):
        for low in itertools.product(range(p), repeat=deg):
            r = list(low) + [1]
            if all(sum(r[k] * digits[u + k - 1] for k in range(deg + 1)) % p == 0 for u in range(1, b + 1)):
                return True
    return False


def test_params():
    assert CUBIC.M == 2 and CUBIC.depth == 4
    assert list(CUBIC.layers()) == [-1, 0, 1]
    assert ArcParams(4, 2).M == 5
    with pytest.raises(ValueError):
        ArcParams(3, -1)


def test_membership_examples():
    zero = JetLaurent.zero(F5, 1, -4)
    assert arc_member(zero, 0, CUBIC)
    assert not arc_member(zero, -1, CUBIC)
    a = parse_jetlaurent(F5, 0, "t^-1", -4)
    assert not arc_member(a, 0, CUBIC)
    assert arc_witness(a, 1, CUBIC) == (0, 1)
    assert dirichlet_layer(a, CUBIC) == 1
    assert dirichlet_layer(zero, CUBIC) == 0


def test_membership_needs_depth():
    with pytest.raises(InsufficientPrecision):
        arc_member(JetLaurent.zero(F5, 0, -3), 0, CUBIC)


def test_monic_polys_order_and_count():
    polys = list(monic_polys(F3, 2))
    assert len(polys) == 1 + 3 + 9
    assert polys[:4] == [(1,), (0, 1), (1, 1), (2, 1)]


@pytest.mark.parametrize("field,d,e", [(F5, 3, 1), (F3, 2, 1), (F3, 2, 2)])
def test_layer_table_matches_reference(field, d, e):
    params = ArcParams(d, e)
    table = layer_table(field, params)
    grid = batch.digit_grid(field.q, params.depth)
    for idx, digits in enumerate(grid):
        digits = [int(c) for c in digits]
        want = next((J for J in range(params.M + 1) if ref_member(digits, J, d, e, field.p)), params.M + 1)
        assert table[idx] == want


def test_table_agrees_with_scalar_search():
    table = layer_table(F5, CUBIC)
    rng = np.random.default_rng(3)
    for idx in rng.choice(table.size, size=60, replace=False):
        alpha = AlphaRep.from_index(F5, 0, 4, int(idx))
        assert dirichlet_layer(alpha, CUBIC) == table[idx]


def test_coverage_on_all_depth_four_classes():
    table = layer_table(F5, CUBIC)
    assert table.size == 625 and table.max() <= CUBIC.M
    assert np.bincount(table).tolist() == [1, 24, 600]


def test_membership_is_monotone_in_J():
    rng = np.random.default_rng(11)
    for _ in range(80):
        alpha = JetLaurent.from_digits(F5, rng.integers(0, 5, size=(1, 4)).tolist())
        verdicts = [arc_member(alpha, J, CUBIC) for J in range(-1, 4)]
        assert verdicts == sorted(verdicts)


def test_membership_ignores_higher_components():
    for a0 in itertools.islice(itertools.product(range(5), repeat=4), 0, 625, 13):
        base = arc_member(JetLaurent.from_digits(F5, [list(a0)]), 1, CUBIC)
        for a1 in itertools.product(range(5), repeat=4):
            if sum(a1) % 7:
                continue
            assert arc_member(JetLaurent.from_digits(F5, [list(a0), list(a1)]), 1, CUBIC) == base


def test_measure_examples():
    assert arc_measure_count(F5, -1, CUBIC, 0).class_count == 0
    rep = arc_measure_count(F5, 0, CUBIC, 0)
    assert rep.class_count == 1 and rep.measure == Fraction(1, 625) == rep.bound and rep.bound_ok
    rep = arc_measure_count(F5, 1, CUBIC, 0)
    assert rep.class_count == 25 and rep.measure <= Fraction(1, 25) and rep.bound_ok
    # measure does not depend on m: higher components are free
    assert arc_measure_count(F5, 1, CUBIC, 1).measure == rep.measure
    for J in range(CUBIC.M + 1):
        assert arc_measure_count(F5, J, CUBIC, 0).bound_ok


def test_subsets_partition_the_classes():
    parts = [alpha0_classes(F5, CUBIC, ("layer", J)) for J in CUBIC.layers()]
    joined = np.sort(np.concatenate(parts))
    assert joined.tolist() == list(range(625))
    assert alpha0_classes(F5, CUBIC, ("major", 0)).tolist() == [0]
    assert alpha0_classes(F5, CUBIC, ("major", -1)).size == 0


def test_alpha_rep_round_trip():
    rep = AlphaRep.from_index(F5, 1, 3, 5**4 + 7)
    assert (rep.m, rep.P) == (1, 3)
    assert AlphaRep.from_laurent(rep.to_laurent()) == rep
    assert rep.digits == ((0, 1, 0), (0, 1, 2))


def test_circle_integral_examples():
    assert circle_integral(CUBE, 0, 0).value == 1
    assert circle_integral(CUBE, 1, 1).value == 25


@pytest.mark.parametrize("spec,e,m", [("diag:1,2", 1, 0), ("112=1;222=3", 1, 0), ("diag:1", 1, 1), ("diag:1,1", 0, 1), ("diag:2", 2, 0)])
def test_circle_integral_equals_direct_count(spec, e, m):
    F = parse_form(spec, F5, d=3)
    assert circle_integral(F, e, m).value == count_direct_Nm(F, e, m).value


def test_circle_integral_in_extension_field():
    F25 = FiniteField(5, 2, (1, 1, 1))
    F = parse_form("diag:1,g", F25, d=3)
    assert circle_integral(F, 0, 0).value == count_direct_Nm(F, 0, 0).value


@pytest.mark.parametrize("m", [1, 2])
def test_major_arc_recursion(m):
    q, n, d, e = 5, 1, 3, 1
    major = circle_integral(CUBE, e, m, ("major", 0))
    assert major.value == Fraction(q) ** (n * (e + 1) - d * e - 1) * count_direct_Nm(CUBE, e, m - 1).value


def test_layers_reassemble_the_integral():
    rows, total = layer_report(CUBE, 1, 1)
    assert [r.J for r in rows] == [-1, 0, 1]
    assert [r.integral_contribution for r in rows] == [Fraction(1, 25), Fraction(24, 25), 24]
    assert sum(r.integral_contribution for r in rows) == total.value == 25
    assert sum(r.class_count for r in rows) == 5**8


def test_circle_integral_budget():
    with pytest.raises(BudgetExceeded):
        circle_integral(CUBE, 1, 1, budget=1000)

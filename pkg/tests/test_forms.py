import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetcircle.field import FiniteField
from jetcircle.forms import FormSpec, dimensions, eval_form, gradient, multilinear_psi, parse_form, smoothness_check
from jetcircle.jets import JetPoly, parse_jetpoly

from oracles import dict_add, dict_mul, eval_monomials, poly_dict, ref_field

F5 = FiniteField(5)
F7 = FiniteField(7)
F25 = FiniteField(5, 2, (1, 1, 1))


def vectors(field, n, m, deg=2):
    row = st.tuples(*[st.integers(0, field.q - 1)] * (m + 1))
    poly = st.lists(row, max_size=deg + 1).map(lambda rows: JetPoly(field, m, rows))
    return st.tuples(*[poly] * n)


def random_form(rng, field, n, d, terms=4):
    mons = {}
    for _ in range(terms):
        idx = tuple(sorted(int(v) for v in rng.integers(0, n, size=d)))
        mons[idx] = int(rng.integers(1, field.q))
    return FormSpec(field, n, d, mons)


def ref_psi(R, form, i, args, m):
    """d! sum over ordered index tuples of the symmetric coefficient times the product."""
    p, d = form.field.p, form.d
    total = {}
    for rest in itertools.product(range(form.n), repeat=d - 1):
        key = tuple(sorted(rest + (i,)))
        coef = form.monomials.get(key, 0)
        if not coef:
            continue
        orbit = math.factorial(d)
        for v in set(key):
            orbit //= math.factorial(key.count(v))
        # d! / orbit = prod of multiplicities!, an integer
        weight = R.mul(R.vec(coef), R.vec((math.factorial(d) // orbit) % p))
        term = {(0, 0): weight}
        for k, v in enumerate(rest):
            term = dict_mul(R, term, poly_dict(R, args[k][v]), m)
        total = dict_add(R, total, term)
    return total


def test_eval_examples():
    F = FormSpec.diagonal(F5, [1], 3)
    assert eval_form(F, (parse_jetpoly(F5, 1, "s*t"),)).is_zero()
    G = parse_form("diag:1,1", F5, d=3)
    x = (parse_jetpoly(F5, 0, "1 + t"), parse_jetpoly(F5, 0, "2"))
    assert eval_form(G, x) == parse_jetpoly(F5, 0, "4 + 3*t + 3*t^2 + t^3")
    assert eval_form(G, (JetPoly.zero(F5, 0),) * 2).is_zero()


def test_psi_examples():
    F = parse_form("diag:2,3", F7, d=3)
    x = (parse_jetpoly(F7, 0, "t"), parse_jetpoly(F7, 0, "1 + t"))
    y = (parse_jetpoly(F7, 0, "3"), parse_jetpoly(F7, 0, "t^2"))
    # diagonal: Psi_i(x, y) = 6 a_i x_i y_i
    assert multilinear_psi(F, 0, [x, y]) == parse_jetpoly(F7, 0, "36*t")
    assert multilinear_psi(F, 1, [x, y]) == parse_jetpoly(F7, 0, "18*t^2 + 18*t^3")
    zero = (JetPoly.zero(F7, 0),) * 2
    assert multilinear_psi(F, 0, [x, zero]).is_zero()


def test_gradient_examples():
    F = parse_form("diag:1", F5, d=3)
    x = (parse_jetpoly(F5, 1, "1 + s*t"),)
    assert gradient(F, x) == (parse_jetpoly(F5, 1, "3") * x[0] * x[0],)
    assert multilinear_psi(F, 0, [x, x]) == parse_jetpoly(F5, 1, "6") * x[0] * x[0]
    assert gradient(F, (JetPoly.zero(F5, 1),))[0].is_zero()


@pytest.mark.parametrize("field,d", [(F5, 3), (F7, 4), (F25, 3), (F7, 3)])
def test_eval_and_psi_against_reference(field, d):
    rng = np.random.default_rng(d * 100 + field.q)
    R = ref_field(field)
    for trial in range(30):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(0, 3))
        F = random_form(rng, field, n, d)

        def vec():
            return tuple(
                JetPoly(field, m, rng.integers(0, field.q, size=(int(rng.integers(0, 3)), m + 1)).tolist()) for _ in range(n)
            )

        x = vec()
        assert poly_dict(R, eval_form(F, x)) == eval_monomials(R, F.monomials, [poly_dict(R, v) for v in x], m)
        args = [vec() for _ in range(d - 1)]
        for i in range(n):
            assert poly_dict(R, multilinear_psi(F, i, args)) == ref_psi(R, F, i, args, m)


@pytest.mark.parametrize("d", [3, 4])
def test_psi_on_diagonal_equals_factorial_times_gradient(d):
    field = F7
    rng = np.random.default_rng(d)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(0, 3))
        F = random_form(rng, field, n, d)
        x = tuple(JetPoly(field, m, rng.integers(0, 7, size=(2, m + 1)).tolist()) for _ in range(n))
        grad = gradient(F, x)
        c = parse_jetpoly(field, m, str(math.factorial(d - 1) % 7))
        for i in range(n):
            assert multilinear_psi(F, i, [x] * (d - 1)) == c * grad[i]


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_multilinear_and_symmetric(data):
    F = parse_form("112=1;123=2;333=3;223=4", F7, d=3)
    m = data.draw(st.integers(0, 1))
    x, x2, y = (data.draw(vectors(F7, 3, m)) for _ in range(3))
    xs = tuple(a + b for a, b in zip(x, x2))
    for i in range(3):
        assert multilinear_psi(F, i, [xs, y]) == multilinear_psi(F, i, [x, y]) + multilinear_psi(F, i, [x2, y])
        assert multilinear_psi(F, i, [x, y]) == multilinear_psi(F, i, [y, x])


def test_homogeneity_exhaustive_small():
    F = parse_form("112=1;122=3;222=2", F5, d=3)
    lam_polys = [parse_jetpoly(F5, 0, str(lam)) for lam in range(5)]
    for x0, x1 in itertools.product(range(5), repeat=2):
        for y0, y1 in itertools.product(range(5), repeat=2):
            x = (JetPoly(F5, 0, [(x0,), (x1,)]), JetPoly(F5, 0, [(y0,), (y1,)]))
            fx = eval_form(F, x)
            for lam in lam_polys:
                assert eval_form(F, tuple(lam * v for v in x)) == lam * lam * lam * fx


def test_parse_form_variants():
    assert parse_form("diag:1,2", F5, d=3) == FormSpec.diagonal(F5, [1, 2], 3)
    assert parse_form("111=1;222=2", F5) == FormSpec.diagonal(F5, [1, 2], 3)
    assert parse_form("1,1,1=1;2,2,2=2", F5) == FormSpec.diagonal(F5, [1, 2], 3)
    assert parse_form("0", F5, n=2, d=3).is_zero()
    # permuted monomials merge, and 2 + 3 cancels mod 5
    assert parse_form("112=2;121=3", F5, n=2).is_zero()
    assert parse_form("112=2;121=1", F5).monomials == {(0, 0, 1): 3}
    assert parse_form("123=g", F25).monomials == {(0, 1, 2): F25.generator}
    for bad in ("112", "11=1;222=1", "012=1", "diag:1,1"):
        with pytest.raises(ValueError):
            parse_form(bad, F5, n=3 if bad == "diag:1,1" else None, d=3)


def test_spec_string_round_trips_in_extensions():
    rng = np.random.default_rng(5)
    for field in (F5, F25):
        for _ in range(20):
            F = random_form(rng, field, 3, 3)
            assert parse_form(F.spec_string(), field, n=3, d=3) == F
    wide = FormSpec.diagonal(F5, [1] * 11, 3)
    assert parse_form(wide.spec_string(), F5, n=11, d=3) == wide


def test_strict_characteristic():
    with pytest.raises(ValueError):
        FormSpec.diagonal(FiniteField(3), [1], 3)
    F = FormSpec.diagonal(FiniteField(3), [1], 3, strict=False)
    assert not F.char_ok
    with pytest.raises(ValueError):
        F.tensor


def test_smoothness_examples():
    assert smoothness_check(parse_form("diag:1,1,1", F5, d=3), k_max=2).smooth
    assert smoothness_check(parse_form("diag:1", F5, d=3), k_max=4).smooth
    v = smoothness_check(parse_form("112=1", F5, d=3), k_max=2)
    assert not v.smooth
    assert v.witness == (0, 1) and v.witness_degree == 1


def test_smoothness_finds_witness_only_in_extension():
    # z (x^2 - 2y^2 - z^2): the line z = 0 meets the smooth conic where x^2 = 2y^2,
    # and 2 is not a square mod 5
    F = parse_form("113=1;223=3;333=4", F5, d=3)
    v = smoothness_check(F, k_max=2)
    assert not v.smooth and v.witness_degree == 2


def test_blocks_and_restrict():
    F = parse_form("112=1;333=2;344=1", F5, d=3)
    assert F.blocks() == [[0, 1], [2, 3]]
    G = F.restrict([2, 3])
    assert G == parse_form("111=2;122=1", F5, d=3)


def test_with_field_transfers_integer_coefficients():
    F = parse_form("diag:1,6", F7, d=3)
    assert F.with_field(F5) == parse_form("diag:1,1", F5, d=3)
    with pytest.raises(ValueError):
        F.with_field(F25)


def test_dimensions():
    r = dimensions(10, 3, 2)
    assert (r.mu_bar, r.mu) == (19, 22)
    assert dimensions(4, 3, 1).mu_bar == 0
    for n in range(2, 8):
        assert dimensions(n, 3, 0).mu == n - 2

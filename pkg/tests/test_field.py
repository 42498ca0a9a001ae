import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetcircle.errors import FieldMismatch
from jetcircle.field import FiniteField, RootSum, char_eq, ff_trace, parse_field, rootsum_add, rootsum_is_zero, rootsum_magnitude, rootsum_mul_root

from oracles import ref_field, zeta

F5 = FiniteField(5)
F25 = FiniteField(5, 2, (1, 1, 1))
F9 = FiniteField(3, 2)
F8 = FiniteField(2, 3)


@pytest.mark.parametrize("field", [F5, F25, F9, F8, FiniteField(7)])
def test_arithmetic_matches_polynomial_reference(field):
    R = ref_field(field)
    for a in range(field.q):
        for b in range(field.q):
            va, vb = R.vec(a), R.vec(b)
            assert field.add(a, b) == R.code(R.add(va, vb))
            assert field.mul(a, b) == R.code(R.mul(va, vb))
        assert field.trace(a) == R.trace(R.vec(a))
        if a:
            assert field.mul(a, field.inv(a)) == 1


@pytest.mark.parametrize("field", [F25, F9, F8])
def test_vectorized_ops_agree_with_scalar(field):
    a = np.arange(field.q).repeat(field.q)
    b = np.tile(np.arange(field.q), field.q)
    assert field.vadd(a, b).tolist() == [field.add(int(x), int(y)) for x, y in zip(a, b)]
    assert field.vmul(a, b).tolist() == [field.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert field.vneg(a).tolist() == [field.neg(int(x)) for x in a]
    assert field.vtrace(a).tolist() == [field.trace(int(x)) for x in a]


def test_trace_on_prime_field_is_identity():
    for x in F5.elements():
        assert ff_trace(x) == x.code


def test_trace_of_generator_in_f25():
    # g is a root of t^2 + t + 1, so Tr(g) = g + g^5 = g + g^2 = -1
    g = F25.element(F25.generator)
    assert ff_trace(g) == 4
    assert ff_trace(F25.element(0)) == 0


def test_trace_is_additive_and_fp_linear_exhaustively():
    for field in (F25, F9):
        p = field.p
        for a in range(field.q):
            for b in range(field.q):
                assert field.trace(field.add(a, b)) == (field.trace(a) + field.trace(b)) % p
            for lam in range(p):
                assert field.trace(field.mul(lam, a)) == lam * field.trace(a) % p


def test_char_eq_examples():
    assert char_eq(F5.element(0)).counts == (1, 0, 0, 0, 0)
    assert char_eq(F5.element(2)) == RootSum.root(5, 2)


def test_char_eq_is_a_homomorphism_on_f25():
    els = F25.elements()
    for x in els:
        for y in els:
            assert char_eq(x + y) == char_eq(x) * char_eq(y)


@pytest.mark.parametrize("field", [F5, F25, F9, F8])
def test_character_orthogonality_over_the_field(field):
    for c in range(field.q):
        acc = RootSum.zero(field.p)
        for x in range(field.q):
            acc = rootsum_add(acc, RootSum.root(field.p, field.trace(field.mul(c, x))))
        if c == 0:
            assert acc.counts[0] == field.q and acc.rational_value() == field.q
        else:
            assert rootsum_is_zero(acc)


def test_rootsum_examples():
    assert RootSum(5, (3, 3, 3, 3, 3)).is_zero()
    assert rootsum_magnitude(RootSum(5, (625, 0, 0, 0, 0))) == 625
    assert rootsum_magnitude(RootSum(5, (1, 1, 0, 0, 0))) == pytest.approx(2 * math.cos(math.pi / 5), rel=1e-12)
    assert rootsum_mul_root(RootSum.root(5, 4), 3) == RootSum.root(5, 2)


def test_rootsum_rejects_mixed_primes():
    with pytest.raises(FieldMismatch):
        RootSum.root(5, 1) + RootSum.root(7, 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=7, max_size=7), st.lists(st.integers(-50, 50), min_size=7, max_size=7), st.integers(0, 6))
def test_rootsum_matches_complex_embedding(a, b, j):
    x, y = RootSum(7, tuple(a)), RootSum(7, tuple(b))
    cx = sum(c * zeta(7, i) for i, c in enumerate(a))
    cy = sum(c * zeta(7, i) for i, c in enumerate(b))
    assert abs((x + y).complex() - (cx + cy)) < 1e-9
    assert abs((x * y).complex() - cx * cy) < 1e-7
    assert abs(x.mul_root(j).complex() - cx * zeta(7, j)) < 1e-9
    assert abs(x.conj().complex() - cx.conjugate()) < 1e-9


def test_zero_test_agrees_with_magnitude_on_random_accumulations():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        acc = RootSum.zero(5)
        base = int(rng.integers(0, 3))
        for _ in range(int(rng.integers(1, 6))):
            acc = acc + RootSum((5), tuple([base] * 5))
        if rng.random() < 0.5:
            acc = acc.mul_root(int(rng.integers(0, 5))) + RootSum.root(5, int(rng.integers(0, 5)))
        assert acc.is_zero() == (acc.magnitude() < 1e-6)


def test_counts_are_exact_python_ints():
    big = RootSum(5, (2**70, 0, 0, 0, 0))
    assert (big + big).counts[0] == 2**71


def test_parse_field():
    assert parse_field("5") == F5
    assert parse_field("5^2:1,1,1") == F25
    assert parse_field(" 7 ").q == 7
    for bad in ("4", "5^2:1,0,1", "5^2:2,1", "x", "5^0"):
        with pytest.raises(ValueError):
            parse_field(bad)


def test_spec_string_round_trip():
    for field in (F5, F25, F9, F8):
        assert parse_field(field.spec_string()) == field


@pytest.mark.parametrize("field", [F25, F9, F8])
def test_mul_matrix_and_trace_form(field):
    for a in range(field.q):
        M = field.mul_matrix(a)
        for b in range(field.q):
            assert tuple((M @ np.array(field.coords(b))) % field.p) == field.coords(field.mul(a, b))
            ab = np.array(field.coords(a)) @ field.trace_form @ np.array(field.coords(b)) % field.p
            assert ab == field.trace(field.mul(a, b))


def test_field_elem_operators():
    x, y = F25.element(7), F25.element(13)
    assert (x * y).code == F25.mul(7, 13)
    assert (x - y + y) == x
    assert (x ** -1) * x == F25.element(1)
    assert (-x + x).code == 0
    with pytest.raises(ZeroDivisionError):
        F25.element(0).inverse()
    with pytest.raises(FieldMismatch):
        x + F9.element(1)

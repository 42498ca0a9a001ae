import itertools

import numpy as np
import pytest

from jetcircle import batch
from jetcircle.field import FiniteField
from jetcircle.harmonic import (
    _factor_sums,
    _image_points,
    pairing_matrix,
    verify_box_orthogonality,
    verify_integral_orthogonality,
)
from jetcircle.jets import JetLaurent, JetPoly, mul_poly_laurent, psi_m

F3 = FiniteField(3)
F5 = FiniteField(5)
F9 = FiniteField(3, 2)


@pytest.mark.parametrize("field", [F5, F9])
def test_pairing_matrix_reproduces_psi(field):
    rng = np.random.default_rng(field.q)
    m, P, D = 1, 3, 3
    G = pairing_matrix(field, m, P, D)
    for _ in range(40):
        digits = rng.integers(0, field.q, size=(m + 1, P))
        x = rng.integers(0, field.q, size=(m + 1, D))
        A = batch.alpha_coords(field, digits[None])[0]
        xc = batch.coords_flat(field, x[None])[0]
        phase = int(A @ ((G @ xc) % field.p)) % field.p
        alpha = JetLaurent.from_digits(field, digits.tolist())
        want = psi_m(mul_poly_laurent(alpha, JetPoly(field, m, x.T.tolist())))
        assert want.counts[phase] == 1


def test_factor_sums_against_brute_force():
    rng = np.random.default_rng(2)
    p = 5
    W = rng.integers(0, p, size=(30, 3))
    W[:5] = 0
    got = _factor_sums(W, p)
    for w, row in zip(W, got):
        counts = np.zeros(p, dtype=np.int64)
        for a in itertools.product(range(p), repeat=3):
            counts[int(np.dot(a, w)) % p] += 1
        assert row.tolist() == counts.tolist()


def test_image_points_span_the_columns():
    rng = np.random.default_rng(6)
    p = 3
    for _ in range(10):
        L = rng.integers(0, p, size=(3, 4))
        L[2] = (L[0] + L[1]) % p
        got = {tuple(v) for v in _image_points(L, p)}
        want = {tuple((L @ np.array(v)) % p) for v in itertools.product(range(p), repeat=4)}
        assert got == want


@pytest.mark.parametrize("field,m,N", [(F5, 0, 1), (F5, 1, 1), (F3, 1, 2), (F9, 0, 1), (F3, 2, 1)])
def test_integral_routes_agree(field, m, N):
    a = verify_integral_orthogonality(field, m, N, method="explicit")
    b = verify_integral_orthogonality(field, m, N, method="factorized", samples=50)
    assert a.passed and b.passed
    assert (a.method, b.method) == ("explicit", "factorized")


@pytest.mark.parametrize("field,m,N", [(F5, 0, 1), (F5, 0, 2), (F3, 1, 2), (F9, 0, 1), (F3, 2, 1)])
def test_box_routes_agree(field, m, N):
    a = verify_box_orthogonality(field, m, N, method="explicit")
    b = verify_box_orthogonality(field, m, N, method="factorized", samples=50)
    assert a.passed and b.passed


def test_auto_picks_factorized_for_large_grids():
    rep = verify_integral_orthogonality(F5, 2, 2)
    assert rep.method == "factorized" and rep.passed and rep.samples == 200


def test_box_orthogonality_needs_positive_radius():
    with pytest.raises(ValueError):
        verify_box_orthogonality(F5, 0, 0)


def test_deeper_discretization_still_passes():
    assert verify_box_orthogonality(F5, 0, 1, depth=4).passed
    assert verify_integral_orthogonality(F5, 0, 1, depth=4).passed


def test_report_shape():
    d = verify_box_orthogonality(F5, 1, 1).to_dict()
    assert set(d) == {"check", "field", "m", "N", "depth", "parameters", "method", "mismatches", "counterexample", "samples", "pass"}
    assert d["parameters"] == 5 ** (2 * 3) and d["mismatches"] == 0

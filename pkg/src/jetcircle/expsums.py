"""The exponential sum S(alpha), the Weyl count M_m and the shrinking count K_m."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import batch
from .errors import FieldMismatch, InsufficientPrecision, check_budget
from .field import RootSum
from .forms import FormSpec, eval_form, multilinear_psi
from .jets import (
    JetLaurent,
    box_size,
    enumerate_jetpolys,
    mul_poly_laurent,
    shard_bounds,
)
from .parallel import map_shards


@dataclass(frozen=True)
class SumJob:
    """S(alpha) over the box |x|_m <= q^e, split into ``shards`` blocks."""

    F: FormSpec
    e: int
    m: int
    alpha: JetLaurent
    shards: int = 1

    def __post_init__(self):
        if self.alpha.field != self.F.field:
            raise FieldMismatch("alpha and F live over different fields")
        if self.alpha.m != self.m:
            raise FieldMismatch(f"alpha has jet order {self.alpha.m}, job has m={self.m}")
        need = self.F.d * self.e + 1
        if -self.alpha.floor < need:
            raise InsufficientPrecision(f"alpha needs floor <= -{need}, has {self.alpha.floor}")
        if self.shards < 1:
            raise ValueError("shards must be positive")

    @property
    def points(self):
        return box_size(self.F.field.q, self.m, self.F.n, self.e)


def alpha_digit_array(alpha):
    return np.array(alpha.digits(), dtype=np.int64)


def _shard_sum(F, e, m, digits, start, stop):
    field = F.field
    P = digits.shape[1]
    A = batch.alpha_coords(field, digits[None])
    out = np.zeros(field.p, dtype=np.int64)
    chunk = max(1, (1 << 18) // max(1, F.n * (m + 1) * (e + 1)))
    for lo in range(start, stop, chunk):
        X = batch.box_array(field, m, F.n, e + 1, lo, min(stop, lo + chunk))
        vals = batch.eval_form_batch(F, X)
        W = batch.dual_vectors(field, m, P, vals)
        out += batch.character_counts(A, W, np.ones(W.shape[0], dtype=np.int64), field.p)[0]
    return out


def exp_sum_S(job, budget=None, workers=1, method="batch"):
    """S(alpha) = sum over |x|_m <= q^e of psi_m(alpha F(x)), exactly.

    ``method="scalar"`` walks the box with the object-level jet arithmetic
    and serves as an independent route for small boxes.
    """
    check_budget(job.points, budget, "S(alpha)")
    F, e, m = job.F, job.e, job.m
    if method == "scalar":
        return _exp_sum_scalar(job)
    if method != "batch":
        raise ValueError(f"unknown method {method!r}")
    digits = alpha_digit_array(job.alpha)
    total = job.points
    tasks = [(F, e, m, digits, *shard_bounds(total, i, job.shards)) for i in range(job.shards)]
    acc = np.zeros(F.field.p, dtype=np.int64)
    for part in map_shards(_shard_sum, tasks, workers):
        acc += part
    return RootSum.from_array(F.field.p, acc)


def _exp_sum_scalar(job):
    F, m = job.F, job.m
    acc = [0] * F.field.p
    for x in enumerate_jetpolys(F.field, m, F.n, job.e, budget=job.points):
        root = mul_poly_laurent(job.alpha, eval_form(F, x)).psi()
        acc[root.counts.index(1)] += 1
    return RootSum(F.field.p, tuple(acc))


@lru_cache(maxsize=16)
def value_histogram(F, e, m):
    """Distinct values F(x) over the box with multiplicities: ((U, m+1, de+1), (U,))."""
    field = F.field
    Dv = F.d * e + 1
    keys = []
    for X in batch.iter_box(field, m, F.n, e + 1):
        vals = batch.eval_form_batch(F, X)
        keys.append(batch.encode_rows(field.q, vals.reshape(vals.shape[0], -1)))
    uniq, counts = np.unique(np.concatenate(keys), return_counts=True)
    vals = batch.decode_keys(field.q, uniq, (m + 1) * Dv).reshape(-1, m + 1, Dv)
    return vals, counts.astype(np.int64)


def exp_sums(F, e, m, digits, budget=None):
    """S(alpha) for a stack of alpha digit arrays (B, m+1, P): counts (B, p)."""
    check_budget(box_size(F.field.q, m, F.n, e), budget, "S(alpha) table")
    vals, counts = value_histogram(F, e, m)
    W = batch.dual_vectors(F.field, m, digits.shape[-1], vals)
    A = batch.alpha_coords(F.field, digits)
    return batch.character_counts(A, W, counts, F.field.p)


# -- Weyl differencing ---------------------------------------------------------

@lru_cache(maxsize=16)
def psi_histogram(F, m, ncoeffs):
    """Distinct (Psi_1, ..., Psi_n) over tuples with deg_t < ncoeffs, with multiplicities."""
    field, n, d = F.field, F.n, F.d
    Dp = (d - 1) * (ncoeffs - 1) + 1
    keys = []
    for X in batch.iter_box(field, m, n * (d - 1), ncoeffs):
        Xs = [X[:, k * n : (k + 1) * n] for k in range(d - 1)]
        vals = batch.psi_batch(F, Xs)
        keys.append(batch.encode_rows(field.q, vals.reshape(vals.shape[0], -1)))
    uniq, counts = np.unique(np.concatenate(keys), return_counts=True)
    vals = batch.decode_keys(field.q, uniq, n * (m + 1) * Dp).reshape(-1, n, m + 1, Dp)
    return vals, counts.astype(np.int64)


def weyl_threshold(d, r1, r2):
    """M_m tests ||alpha Psi_i||_m < q^-b with this b."""
    return r1 + (d - 1) * r2


def weyl_box_points(F, m, r1, r2):
    return F.field.q ** ((m + 1) * F.n * (F.d - 1) * max(r1 - r2, 0))


def _annihilated(field, digits, vals, b):
    """Mask over rows of vals (U, n, m+1, D): all digits 1..b of alpha*vals[i] vanish."""
    vals = batch.trim_t(vals)
    U, n, m1, D = vals.shape
    M = batch.product_matrix(field, digits, D - 1, b)
    coords = batch.coords_flat(field, vals.reshape(U * n, m1, D))
    hit = ((coords @ M.T) % field.p == 0).all(axis=1)
    return hit.reshape(U, n).all(axis=1)


def weyl_count_M(F, alpha, m, r1, r2, budget=None, method="batch"):
    """M_m(alpha, r1, r2): tuples with |x^(k)|_m < q^{r1-r2} and ||alpha Psi_i|| < q^{-r1-(d-1)r2}."""
    if r1 < 0 or r2 < 0:
        raise ValueError("r1, r2 must be non-negative")
    if alpha.m != m or alpha.field != F.field:
        raise FieldMismatch("alpha does not match F and m")
    check_budget(weyl_box_points(F, m, r1, r2), budget, "M_m")
    ncoeffs = r1 - r2
    b = weyl_threshold(F.d, r1, r2)
    if ncoeffs <= 0:
        return 1
    if method == "scalar":
        return _weyl_scalar(F, alpha, m, ncoeffs, b)
    vals, counts = psi_histogram(F, m, ncoeffs)
    ok = _annihilated(F.field, alpha_digit_array(alpha), vals, b)
    return int(counts[ok].sum())


def _weyl_scalar(F, alpha, m, ncoeffs, b):
    n, d = F.n, F.d
    count = 0
    for flat in enumerate_jetpolys(F.field, m, n * (d - 1), ncoeffs - 1, budget=10**12):
        args = [flat[k * n : (k + 1) * n] for k in range(d - 1)]
        good = True
        for i in range(n):
            rho = multilinear_psi(F, i, args)
            if rho and not mul_poly_laurent(alpha, rho).dist_below(b):
                good = False
                break
        count += good
    return count


@dataclass(frozen=True)
class WeylReport:
    check: str
    s_counts: tuple
    lhs_magnitude: float
    lhs: float
    rhs: int
    m_count: int
    passed: bool

    def to_dict(self):
        return {
            "check": self.check,
            "s_counts": list(self.s_counts),
            "lhs_magnitude": self.lhs_magnitude,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "M": self.m_count,
            "pass": self.passed,
        }


def weyl_rhs(F, e, m, m_count):
    d, n, q = F.d, F.n, F.field.q
    return q ** ((e + 1) * (m + 1) * (2 ** (d - 1) - d + 1) * n) * m_count


def check_weyl_lemma(F, alpha, e, m, budget=None, rel_tol=1e-9, s_value=None):
    """|S(alpha)|^(2^(d-1)) <= q^{(e+1)(m+1)(2^(d-1)-d+1)n} M_m(alpha, e+1, 0)."""
    S = s_value if s_value is not None else exp_sum_S(SumJob(F, e, m, alpha), budget)
    mag = S.magnitude()
    lhs = mag ** (2 ** (F.d - 1))
    mc = weyl_count_M(F, alpha, m, e + 1, 0, budget)
    rhs = weyl_rhs(F, e, m, mc)
    return WeylReport("weyl differencing", S.counts, mag, lhs, rhs, mc, lhs <= rhs * (1 + rel_tol))


# -- shrinking -----------------------------------------------------------------

def _system_matrix(L, a, b):
    field = L[0][0].field
    rows = []
    for Li in L:
        rows.append(np.hstack([batch.product_matrix(field, alpha_digit_array(c), a - 1, b) for c in Li]))
    return np.vstack(rows) % field.p


def _check_system(L, m):
    n = len(L)
    if n == 0 or any(len(Li) != n for Li in L):
        raise ValueError("need n linear forms in n variables")
    field = L[0][0].field
    for Li in L:
        for c in Li:
            if c.field != field or c.m != m:
                raise FieldMismatch("linear form coefficients must share field and jet order")
    return n, field


def shrink_count_K(L, a, b, m, budget=None, method="auto"):
    """K_m(a, b) = #{x : |x|_m < q^a, ||L_i(x)||_m < q^-b for all i}.

    ``L[i][j]`` is the coefficient (a JetLaurent) of x_j in L_i.  The set is
    an F_p-subspace, so ``method="rank"`` counts it as p^(nullity);
    ``"enumerate"`` walks the box; ``"scalar"`` uses object arithmetic.
    """
    if a < 1 or b < 1:
        raise ValueError("a, b must be at least 1")
    n, field = _check_system(L, m)
    points = field.q ** ((m + 1) * n * a)
    if method == "auto":
        method = "enumerate" if points <= 2 * 10**6 else "rank"
    M = _system_matrix(L, a, b)
    if method == "rank":
        return field.p ** (M.shape[1] - batch.rank_mod_p(M, field.p))
    check_budget(points, budget, "K_m")
    if method == "scalar":
        return _shrink_scalar(L, a, b, m, n, field)
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    count = 0
    for X in batch.iter_box(field, m, n, a):
        coords = batch.coords_flat(field, X)
        count += int(((coords @ M.T) % field.p == 0).all(axis=1).sum())
    return count


def _shrink_scalar(L, a, b, m, n, field):
    count = 0
    for x in enumerate_jetpolys(field, m, n, a - 1, budget=10**12):
        good = True
        for Li in L:
            acc = JetLaurent.zero(field, m, -b)
            for c, xj in zip(Li, x):
                acc = acc + mul_poly_laurent(c, xj)
            if not acc.dist_below(b):
                good = False
                break
        count += good
    return count


@dataclass(frozen=True)
class ShrinkReport:
    check: str
    reading: str
    a: int
    b: int
    r: int
    lhs: int
    rhs: int
    passed: bool

    def to_dict(self):
        return {
            "check": self.check,
            "reading": self.reading,
            "a": self.a,
            "b": self.b,
            "r": self.r,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pass": self.passed,
        }


def check_shrinking(L, a, b, r, m, budget=None, method="auto"):
    """K_m(a, b) <= q^{(m+1)nr} K_m(a-r, b+r), for 0 <= r < a <= b.

    The right-hand count is taken at the same jet order m.
    """
    if not 0 <= r < a <= b:
        raise ValueError(f"need 0 <= r < a <= b, got a={a}, b={b}, r={r}")
    n, field = _check_system(L, m)
    lhs = shrink_count_K(L, a, b, m, budget, method)
    rhs = field.q ** ((m + 1) * n * r) * shrink_count_K(L, a - r, b + r, m, budget, method)
    return ShrinkReport("shrinking", "K_m(a-r, b+r) at the same jet order", a, b, r, lhs, rhs, lhs <= rhs)


# -- random inputs -------------------------------------------------------------

def random_alpha(field, m, P, rng):
    return JetLaurent.from_digits(field, rng.integers(0, field.q, size=(m + 1, P)).tolist())


def random_alpha_digits(field, m, P, rng, count):
    return rng.integers(0, field.q, size=(count, m + 1, P), dtype=np.int64)


def random_linear_system(field, n, m, depth, rng):
    """n x n coefficients with uniformly random fractional digits down to t^-depth."""
    return [[random_alpha(field, m, depth, rng) for _ in range(n)] for _ in range(n)]


def integral_system(field, n, m, depth):
    """Linear forms whose coefficients are integral (zero fractional parts)."""
    return [[JetLaurent.zero(field, m, -depth) for _ in range(n)] for _ in range(n)]


def monomial_system(field, m, depth, code, power):
    """The single form L(x) = c t^-power x."""
    digits = [[0] * depth for _ in range(m + 1)]
    digits[0][power - 1] = code
    return [[JetLaurent.from_digits(field, digits)]]


__all__ = [
    "SumJob",
    "exp_sum_S",
    "exp_sums",
    "value_histogram",
    "weyl_count_M",
    "check_weyl_lemma",
    "shrink_count_K",
    "check_shrinking",
    "WeylReport",
    "ShrinkReport",
    "random_alpha",
    "random_alpha_digits",
    "random_linear_system",
]

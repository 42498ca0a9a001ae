"""Major arcs M(J), the layer decomposition of T^(m) and the discretized circle integral.

alpha in T^(m) is discretized by its digits down to t^-P.  For |x|_m <= q^e
every psi_m(alpha F(x)) only sees digits down to t^-(de+1), so with
P = de + 1 the Haar integral over T^(m) is the average over q^{(m+1)P}
classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import batch
from .errors import CoverageViolation, InsufficientPrecision, NonIntegralResult, check_budget
from .expsums import value_histogram
from .field import RootSum
from .jets import JetLaurent, JetPoly, box_size, mul_poly_laurent


@dataclass(frozen=True)
class ArcParams:
    d: int
    e: int

    def __post_init__(self):
        if self.d < 1 or self.e < 0:
            raise ValueError("need d >= 1 and e >= 0")

    @property
    def M(self):
        return -(-(self.d * self.e + 1) // 2)

    @property
    def depth(self):
        """de + 1, the digit depth every arc test needs."""
        return self.d * self.e + 1

    def threshold(self, J):
        """M(J) asks ||alpha_0 r||_0 < q^-b with b = de + 1 - J."""
        return self.depth - J

    def layers(self):
        """Layer indices J = -1 .. M-1; layer J is M(J+1) minus M(J)."""
        return range(-1, self.M)


@dataclass(frozen=True)
class AlphaRep:
    """Digits of alpha: ``digits[i][j-1]`` is the coefficient of s^i t^-j."""

    field: object
    digits: tuple

    @classmethod
    def from_laurent(cls, alpha):
        return cls(alpha.field, alpha.digits())

    @classmethod
    def from_index(cls, field, m, P, index):
        row = batch.digit_grid(field.q, (m + 1) * P, index, index + 1)[0]
        return cls(field, tuple(tuple(int(c) for c in row[i * P : (i + 1) * P]) for i in range(m + 1)))

    @property
    def m(self):
        return len(self.digits) - 1

    @property
    def P(self):
        return len(self.digits[0])

    def to_laurent(self):
        return JetLaurent.from_digits(self.field, self.digits)


def _as_alpha0(alpha):
    if isinstance(alpha, AlphaRep):
        alpha = alpha.to_laurent()
    return alpha.reduce(0)


def monic_polys(field, J):
    """Monic r with deg r <= J: by degree, then lexicographic in the lower coefficients."""
    for j in range(J + 1):
        for low in batch.digit_grid(field.q, j):
            yield tuple(int(c) for c in reversed(low)) + (1,)


def arc_witness(alpha, J, params):
    """The first monic r (coefficients, constant first) with ||alpha_0 r|| < q^{J-de-1}, or None."""
    if J < 0:
        return None
    a0 = _as_alpha0(alpha)
    b = params.threshold(J)
    if b <= 0:
        return (1,)
    if -a0.floor < params.depth:
        raise InsufficientPrecision(f"arc tests need alpha digits down to t^-{params.depth}, have {a0.floor}")
    field = a0.field
    for r in monic_polys(field, J):
        rpoly = JetPoly(field, 0, [(c,) for c in r])
        if mul_poly_laurent(a0, rpoly).dist_below(b):
            return r
    return None


def arc_member(alpha, J, params):
    """Whether alpha lies in M(J); depends on alpha_0 only."""
    return arc_witness(alpha, J, params) is not None


def dirichlet_layer(alpha, params):
    """Minimal J with alpha in M(J); CoverageViolation if none up to M."""
    for J in range(0, params.M + 1):
        if arc_member(alpha, J, params):
            return J
    raise CoverageViolation(f"alpha_0 = {alpha!r} lies in no M(J) with J <= {params.M}")


def layer_table(field, params, P=None):
    """Minimal J for every depth-P class of alpha_0, indexed like digit_grid(q, P).

    Classes outside M(M) get M + 1 (a coverage violation).
    """
    P = params.depth if P is None else P
    if P < params.depth:
        raise InsufficientPrecision(f"arc tests need depth {params.depth}, have {P}")
    A = batch.alpha_coords(field, batch.digit_grid(field.q, P)[:, None, :])
    out = np.full(A.shape[0], params.M + 1, dtype=np.int64)
    for J in range(params.M, -1, -1):
        b = params.threshold(J)
        member = np.zeros(A.shape[0], dtype=bool)
        if b <= 0:
            member[:] = True
        else:
            for r in monic_polys(field, J):
                Mr = batch.alpha_matrix(field, np.array([r], dtype=np.int64), P, b)
                member |= ((A @ Mr.T) % field.p == 0).all(axis=1)
        out[member] = J
    return out


def alpha0_classes(field, params, subset, P=None):
    """Indices of depth-P alpha_0 classes in ``subset``.

    ``subset`` is ``"all"``, ``("major", J)`` for M(J) or ``("layer", J)`` for
    M(J+1) minus M(J), with layer -1 being M(0).
    """
    P = params.depth if P is None else P
    if subset == "all":
        return np.arange(field.q**P, dtype=np.int64)
    kind, J = subset
    table = layer_table(field, params, P)
    if kind == "major":
        return np.nonzero(table <= J)[0] if J >= 0 else np.zeros(0, dtype=np.int64)
    if kind == "layer":
        return np.nonzero(table == J + 1)[0]
    raise ValueError(f"unknown subset {subset!r}")


@dataclass(frozen=True)
class MeasureReport:
    q: int
    J: int
    class_count: int
    measure: Fraction
    bound: Fraction
    bound_ok: bool

    def to_dict(self):
        return {
            "J": self.J,
            "class_count": self.class_count,
            "measure": str(self.measure),
            "measure_log_q": _log_q(self.measure, self.q),
            "bound": str(self.bound),
            "bound_ok": self.bound_ok,
        }


def _log_q(value, q):
    if value == 0:
        return None
    return (math.log(value.numerator) - math.log(value.denominator)) / math.log(q)


def arc_measure_count(field, J, params, m, P=None):
    """Classes of depth-P alpha in M(J), the measure they carry, and the bound q^{2J-de-1}."""
    P = params.depth if P is None else P
    q = field.q
    if J < 0:
        count = 0
    else:
        count = int((layer_table(field, params, P) <= J).sum()) * q ** (m * P)
    measure = Fraction(count, q ** ((m + 1) * P))
    bound = Fraction(q) ** (2 * J - params.depth)
    return MeasureReport(q, J, count, measure, bound, measure <= bound)


# -- the circle integral -------------------------------------------------------

def alpha_class_chunks(field, m, P, alpha0_idx, chunk_rows=1 << 16):
    """Coordinate arrays of the classes (alpha_0 in alpha0_idx, alpha_1..alpha_m free)."""
    rest_total = field.q ** (m * P)
    a0 = batch.digit_grid(field.q, P)[alpha0_idx] if alpha0_idx.size else np.zeros((0, P), dtype=np.int64)
    a0c = batch.coords_flat(field, a0) if a0.size else np.zeros((0, P * field.k), dtype=np.int64)
    rest_step = min(rest_total, max(1, chunk_rows))
    for rs in range(0, rest_total, rest_step):
        rest = batch.digit_grid(field.q, m * P, rs, min(rest_total, rs + rest_step))
        rc = batch.coords_flat(field, rest) if m else np.zeros((1, 0), dtype=np.int64)
        per = max(1, chunk_rows // rc.shape[0])
        for s in range(0, a0c.shape[0], per):
            block = a0c[s : s + per]
            yield np.hstack([np.repeat(block, rc.shape[0], axis=0), np.tile(rc, (block.shape[0], 1))])


@dataclass(frozen=True)
class IntegralResult:
    subset: object
    classes: int
    total: RootSum
    value: Fraction

    def to_dict(self):
        return {
            "subset": _subset_name(self.subset),
            "classes": self.classes,
            "sum_counts": list(self.total.counts),
            "value": str(self.value),
        }


def _subset_name(subset):
    return subset if isinstance(subset, str) else f"{subset[0]}({subset[1]})"


def circle_integral(F, e, m, subset="all", budget=None):
    """q^{-(m+1)(de+1)} times the sum of S(alpha) over the classes in ``subset``.

    The sum is an exact RootSum; it must be a rational integer (the class
    sets are stable under F_p^x scaling), and for ``subset="all"`` the
    quotient must be an integer.
    """
    field = F.field
    params = ArcParams(F.d, e)
    P = params.depth
    q = field.q
    idx = alpha0_classes(field, params, subset, P)
    classes = idx.size * q ** (m * P)
    check_budget(classes, budget, "alpha classes")
    vals, weights = value_histogram_checked(F, e, m, budget)
    W = batch.dual_vectors(field, m, P, vals)
    total = np.zeros(field.p, dtype=np.int64)
    for A in alpha_class_chunks(field, m, P, idx):
        total += batch.character_total(A, W, weights, field.p)
    rs = RootSum.from_array(field.p, total)
    if not rs.is_rational():
        raise NonIntegralResult(f"sum of S(alpha) over {_subset_name(subset)} is not rational: {rs!r}")
    value = Fraction(rs.rational_value(), q ** ((m + 1) * P))
    if subset == "all" and value.denominator != 1:
        raise NonIntegralResult(f"circle integral {value} is not an integer")
    return IntegralResult(subset, classes, rs, value)


def value_histogram_checked(F, e, m, budget=None):
    check_budget(box_size(F.field.q, m, F.n, e), budget, "F-value table")
    return value_histogram(F, e, m)


@dataclass(frozen=True)
class LayerRow:
    J: int
    class_count: int
    measure_log_q: float | None
    integral_contribution: Fraction

    def to_dict(self):
        return {
            "J": self.J,
            "class_count": self.class_count,
            "measure_log_q": self.measure_log_q,
            "integral_contribution": str(self.integral_contribution),
        }


def layer_report(F, e, m, budget=None):
    """One row per layer J = -1 .. M-1 (layer -1 is M(0)), plus the total."""
    params = ArcParams(F.d, e)
    q = F.field.q
    rows = []
    for J in params.layers():
        res = circle_integral(F, e, m, ("layer", J), budget)
        meas = Fraction(res.classes, q ** ((m + 1) * params.depth))
        rows.append(LayerRow(J, res.classes, _log_q(meas, q), res.value))
    total = circle_integral(F, e, m, "all", budget)
    return rows, total

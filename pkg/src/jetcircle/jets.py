"""Jet rings R_m = F_q[s]/(s^{m+1}), O_m = R_m[t], and fractional Laurent parts.

Norms are reported as exponents: ``|x| = q**norm_abs(x)``, with ``-inf``
standing for the norm of zero.  Laurent elements keep only their fractional
part, down to an explicit precision floor; digits below the floor are unknown
and any query that needs them raises :class:`InsufficientPrecision`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import FieldMismatch, InsufficientPrecision, check_budget
from .field import RootSum

NEG_INF = -math.inf


def _same_field(a, b):
    if a.field != b.field or a.m != b.m:
        raise FieldMismatch("operands over different fields or jet orders")


@dataclass(frozen=True)
class JetScalar:
    """c_0 + c_1 s + ... + c_m s^m with codes c_i in F_q."""

    field: object
    comps: tuple

    @property
    def m(self):
        return len(self.comps) - 1

    @classmethod
    def zero(cls, field, m):
        return cls(field, (0,) * (m + 1))

    def elements(self):
        return tuple(self.field.element(c) for c in self.comps)

    def __add__(self, other):
        _same_field(self, other)
        add = self.field.add
        return JetScalar(self.field, tuple(add(a, b) for a, b in zip(self.comps, other.comps)))

    def __neg__(self):
        return JetScalar(self.field, tuple(self.field.neg(a) for a in self.comps))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        _same_field(self, other)
        return JetScalar(self.field, _smul(self.field, self.comps, other.comps))

    def scale(self, c):
        return JetScalar(self.field, tuple(self.field.mul(c, a) for a in self.comps))

    def valuation(self):
        """s-adic valuation; m + 1 for zero."""
        for i, c in enumerate(self.comps):
            if c:
                return i
        return len(self.comps)

    def reduce(self, l):
        if l > self.m:
            raise ValueError(f"cannot reduce order {self.m} jet to order {l}")
        return JetScalar(self.field, self.comps[: l + 1])

    def __bool__(self):
        return any(self.comps)


def _smul(field, a, b):
    """Truncated product of two s-coefficient tuples of equal length."""
    add, mul = field.add, field.mul
    n = len(a)
    out = [0] * n
    for i, ai in enumerate(a):
        if ai:
            for j in range(n - i):
                bj = b[j]
                if bj:
                    out[i + j] = add(out[i + j], mul(ai, bj))
    return tuple(out)


class JetPoly:
    """Element of O_m = R_m[t], stored as rows of s-coefficients by t-degree.

    ``rows[i][j]`` is the coefficient of ``s^j t^i``.  Trailing zero rows are
    trimmed so equal polynomials are structurally equal.
    """

    __slots__ = ("field", "m", "rows")

    def __init__(self, field, m, rows=()):
        rows = [tuple(r) for r in rows]
        for r in rows:
            if len(r) != m + 1:
                raise ValueError("each t-coefficient needs m + 1 s-components")
        while rows and not any(rows[-1]):
            rows.pop()
        self.field = field
        self.m = m
        self.rows = tuple(rows)

    @classmethod
    def zero(cls, field, m):
        return cls(field, m)

    @classmethod
    def monomial(cls, field, m, code, s_deg=0, t_deg=0):
        if s_deg > m:
            return cls(field, m)
        rows = [(0,) * (m + 1)] * t_deg
        row = [0] * (m + 1)
        row[s_deg] = code
        return cls(field, m, rows + [tuple(row)])

    @classmethod
    def from_components(cls, field, components):
        """Build from (x_0, ..., x_m), x_j a sequence of t-coefficients."""
        m = len(components) - 1
        width = max((len(c) for c in components), default=0)
        rows = [
            tuple(components[j][i] if i < len(components[j]) else 0 for j in range(m + 1))
            for i in range(width)
        ]
        return cls(field, m, rows)

    @classmethod
    def from_tcoeffs(cls, field, tcoeffs):
        m = tcoeffs[0].m if tcoeffs else 0
        return cls(field, m, [c.comps for c in tcoeffs])

    @property
    def tcoeffs(self):
        return tuple(JetScalar(self.field, r) for r in self.rows)

    def components(self):
        """Project to (x_0, ..., x_m) in O^{m+1}; each x_j trimmed."""
        out = []
        for j in range(self.m + 1):
            col = [r[j] for r in self.rows]
            while col and col[-1] == 0:
                col.pop()
            out.append(tuple(col))
        return tuple(out)

    @property
    def deg_t(self):
        """Largest t-exponent with a nonzero coefficient, -1 for zero."""
        return len(self.rows) - 1

    def is_zero(self):
        return not self.rows

    def __bool__(self):
        return bool(self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, JetPoly)
            and self.field == other.field
            and self.m == other.m
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.m, self.rows))

    def __add__(self, other):
        _same_field(self, other)
        add = self.field.add
        zero = (0,) * (self.m + 1)
        n = max(len(self.rows), len(other.rows))
        rows = []
        for i in range(n):
            a = self.rows[i] if i < len(self.rows) else zero
            b = other.rows[i] if i < len(other.rows) else zero
            rows.append(tuple(add(x, y) for x, y in zip(a, b)))
        return JetPoly(self.field, self.m, rows)

    def __neg__(self):
        neg = self.field.neg
        return JetPoly(self.field, self.m, [tuple(neg(c) for c in r) for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, JetScalar):
            other = JetPoly(self.field, other.m, [other.comps])
        _same_field(self, other)
        if not self.rows or not other.rows:
            return JetPoly(self.field, self.m)
        add = self.field.add
        zero = (0,) * (self.m + 1)
        out = [zero] * (len(self.rows) + len(other.rows) - 1)
        for i, a in enumerate(self.rows):
            if not any(a):
                continue
            for j, b in enumerate(other.rows):
                if any(b):
                    prod = _smul(self.field, a, b)
                    out[i + j] = tuple(add(x, y) for x, y in zip(out[i + j], prod))
        return JetPoly(self.field, self.m, out)

    def scale(self, c):
        mul = self.field.mul
        return JetPoly(self.field, self.m, [tuple(mul(c, x) for x in r) for r in self.rows])

    def __pow__(self, e):
        out = JetPoly.monomial(self.field, self.m, 1)
        for _ in range(e):
            out = out * self
        return out

    def reduce(self, l):
        if l > self.m:
            raise ValueError(f"cannot reduce order {self.m} jet to order {l}")
        return JetPoly(self.field, l, [r[: l + 1] for r in self.rows])

    def s_valuation(self):
        """Largest v with every coefficient divisible by s^v; m + 1 for zero."""
        v = self.m + 1
        for r in self.rows:
            for j, c in enumerate(r):
                if c:
                    v = min(v, j)
                    break
        return v

    def __repr__(self):
        return f"JetPoly({format_jet(self)!r}, m={self.m})"


@dataclass(frozen=True)
class FracLaurent:
    """Fractional part sum_{floor <= i <= -1} a_i t^i of an element of K_inf.

    ``digits[j - 1]`` holds the coefficient of ``t^-j``.
    """

    field: object
    digits: tuple

    def __post_init__(self):
        if not self.digits:
            raise ValueError("precision floor must be at most -1")

    @property
    def floor(self):
        return -len(self.digits)

    @classmethod
    def zero(cls, field, floor):
        return cls(field, (0,) * (-floor))

    def coeff(self, i):
        if not self.floor <= i <= -1:
            raise InsufficientPrecision(f"t^{i} is outside the stored window [{self.floor}, -1]")
        return self.digits[-i - 1]

    def norm(self):
        """Exponent of the distance-to-nearest-integer norm."""
        for j, c in enumerate(self.digits, start=1):
            if c:
                return -j
        return NEG_INF

    def below(self, b):
        """Whether ||self|| < q^-b, i.e. the digits of t^-1 .. t^-b vanish."""
        if b <= 0:
            return True
        if b > len(self.digits):
            raise InsufficientPrecision(f"||.|| < q^-{b} needs floor <= -{b}, have {self.floor}")
        return not any(self.digits[:b])

    def __add__(self, other):
        n = min(len(self.digits), len(other.digits))
        add = self.field.add
        return FracLaurent(self.field, tuple(add(a, b) for a, b in zip(self.digits[:n], other.digits[:n])))

    def __neg__(self):
        return FracLaurent(self.field, tuple(self.field.neg(a) for a in self.digits))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return FracLaurent(self.field, tuple(self.field.mul(c, a) for a in self.digits))

    def truncate(self, floor):
        if floor < self.floor:
            raise InsufficientPrecision("cannot lower the precision floor")
        return FracLaurent(self.field, self.digits[:-floor])


class JetLaurent:
    """alpha = alpha_0 + s alpha_1 + ... + s^m alpha_m in T^(m), fractional parts only."""

    __slots__ = ("field", "parts")

    def __init__(self, field, parts):
        parts = tuple(parts)
        floors = {p.floor for p in parts}
        if len(floors) != 1:
            n = min(len(p.digits) for p in parts)
            parts = tuple(p.truncate(-n) for p in parts)
        self.field = field
        self.parts = parts

    @classmethod
    def zero(cls, field, m, floor):
        return cls(field, [FracLaurent.zero(field, floor)] * (m + 1))

    @classmethod
    def from_digits(cls, field, digits):
        """``digits[i][j - 1]`` is the coefficient of ``s^i t^-j``."""
        return cls(field, [FracLaurent(field, tuple(int(c) for c in row)) for row in digits])

    @property
    def m(self):
        return len(self.parts) - 1

    @property
    def floor(self):
        return self.parts[0].floor

    def digits(self):
        return tuple(p.digits for p in self.parts)

    def __eq__(self, other):
        return isinstance(other, JetLaurent) and self.field == other.field and self.digits() == other.digits()

    def __hash__(self):
        return hash(self.digits())

    def __add__(self, other):
        _same_field(self, other)
        return JetLaurent(self.field, [a + b for a, b in zip(self.parts, other.parts)])

    def __neg__(self):
        return JetLaurent(self.field, [-a for a in self.parts])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return JetLaurent(self.field, [a.scale(c) for a in self.parts])

    def reduce(self, l):
        if l > self.m:
            raise ValueError(f"cannot reduce order {self.m} to order {l}")
        return JetLaurent(self.field, self.parts[: l + 1])

    def psi(self):
        tr = self.field.trace
        total = sum(tr(part.digits[0]) for part in self.parts)
        return RootSum.root(self.field.p, total)

    def norm_dist(self, l=None):
        parts = self.parts if l is None else self.reduce(l).parts
        return max(part.norm() for part in parts)

    def dist_below(self, b, l=None):
        """Whether ||alpha||_l < q^-b."""
        parts = self.parts if l is None else self.reduce(l).parts
        return all(part.below(b) for part in parts)

    def mul_poly(self, x):
        return mul_poly_laurent(self, x)

    def __repr__(self):
        return f"JetLaurent({format_jet(self)!r}, m={self.m}, floor={self.floor})"


def norm_abs(x):
    """|x|_m as an exponent of q; -inf for zero."""
    return NEG_INF if x.is_zero() else x.deg_t


def norm_dist(alpha, l=None):
    """||alpha||_l as an exponent of q; -inf when every stored digit vanishes."""
    return alpha.norm_dist(l)


def reduce(obj, l):
    """The reduction map pi_l, dropping s-components above l."""
    return obj.reduce(l)


def psi_m(alpha):
    """psi_m(alpha) = prod_i e_q(coefficient of t^-1 in alpha_i)."""
    return alpha.psi()


def mul_poly_laurent(alpha, x):
    """Fractional part of alpha * x, truncated at s^{m+1}.

    The result keeps the digits that are determined by the stored digits of
    alpha: its floor is ``floor(alpha) + deg_t(x)``.
    """
    if alpha.field != x.field or alpha.m != x.m:
        raise FieldMismatch("operands over different fields or jet orders")
    field = alpha.field
    m = alpha.m
    P = -alpha.floor
    if x.is_zero():
        return JetLaurent.zero(field, m, alpha.floor)
    D = x.deg_t
    depth = P - D
    if depth < 1:
        raise InsufficientPrecision(
            f"alpha with floor {alpha.floor} times a degree-{D} polynomial determines no fractional digit"
        )
    add, mul = field.add, field.mul
    adig = alpha.digits()
    xcols = [[r[j] for r in x.rows] for j in range(m + 1)]
    out = []
    for k in range(m + 1):
        row = [0] * depth
        for i in range(k + 1):
            a = adig[i]
            xj = xcols[k - i]
            for u in range(1, depth + 1):
                acc = row[u - 1]
                for v, c in enumerate(xj):
                    if c:
                        av = a[u + v - 1]
                        if av:
                            acc = add(acc, mul(av, c))
                row[u - 1] = acc
        out.append(row)
    return JetLaurent.from_digits(field, out)


def box_size(q, m, n, e):
    """Number of n-vectors in O_m with |x|_m <= q^e."""
    if e < 0:
        return 1
    return q ** ((m + 1) * n * (e + 1))


def enumerate_jetpolys(field, m, n, e, budget=None, shard=None):
    """Yield every n-vector x of O_m with deg_t x <= e exactly once.

    Order is lexicographic in the digit vector indexed (variable, t-degree,
    s-degree).  ``shard=(i, w)`` restricts to the i-th of w contiguous blocks.
    """
    total = box_size(field.q, m, n, e)
    check_budget(total, budget)
    if e < 0:
        if shard is None or shard[0] == 0:
            yield tuple(JetPoly.zero(field, m) for _ in range(n))
        return
    start, stop = 0, total
    if shard is not None:
        start, stop = shard_bounds(total, *shard)
    width = (e + 1) * (m + 1)
    digits = itertools.islice(itertools.product(range(field.q), repeat=n * width), start, stop)
    for vec in digits:
        polys = []
        for v in range(n):
            block = vec[v * width : (v + 1) * width]
            rows = [block[i * (m + 1) : (i + 1) * (m + 1)] for i in range(e + 1)]
            polys.append(JetPoly(field, m, rows))
        yield tuple(polys)


def shard_bounds(total, i, w):
    if not 0 <= i < w:
        raise ValueError(f"shard index {i} out of range for {w} shards")
    base, extra = divmod(total, w)
    start = i * base + min(i, extra)
    return start, start + base + (1 if i < extra else 0)


# -- literal syntax -----------------------------------------------------------

def _split_terms(text):
    text = text.replace(" ", "").replace("^(", "^").replace(")", "")
    terms = []
    cur = ""
    for i, ch in enumerate(text):
        if ch in "+-" and cur and not cur.endswith("^"):
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    if cur:
        terms.append(cur)
    return terms


def _parse_term(field, term):
    sign = 1
    while term and term[0] in "+-":
        if term[0] == "-":
            sign = -sign
        term = term[1:]
    if not term:
        raise ValueError("empty term")
    coeff = 1
    s_deg = 0
    t_deg = 0
    for factor in term.split("*"):
        base, _, exp = factor.partition("^")
        power = int(exp) if exp else 1
        if base == "s":
            s_deg += power
        elif base == "t":
            t_deg += power
        elif base == "g":
            if field.k == 1:
                raise ValueError("the generator g only exists in extension fields")
            coeff = field.mul(coeff, field.pow(field.generator, power))
        elif base.isdigit():
            if exp:
                raise ValueError(f"unexpected exponent on integer {factor!r}")
            coeff = field.mul(coeff, field.from_int(int(base)))
        else:
            raise ValueError(f"cannot parse factor {factor!r}")
    if sign < 0:
        coeff = field.neg(coeff)
    return coeff, s_deg, t_deg


def _parse_monomials(field, text):
    text = text.strip()
    if text in ("", "0"):
        return []
    return [_parse_term(field, t) for t in _split_terms(text)]


def parse_jetpoly(field, m, text):
    """Parse e.g. ``"2*t^2 + s*t + 3*s^2"`` into an element of O_m."""
    out = JetPoly.zero(field, m)
    for coeff, sd, td in _parse_monomials(field, text):
        if td < 0:
            raise ValueError("negative t-exponent in a polynomial literal")
        out = out + JetPoly.monomial(field, m, coeff, sd, td)
    return out


def parse_jetlaurent(field, m, text, floor):
    """Parse e.g. ``"t^-2 + 3*s*t^-1"`` into T^(m) with the given floor."""
    digits = [[0] * (-floor) for _ in range(m + 1)]
    for coeff, sd, td in _parse_monomials(field, text):
        if td >= 0:
            raise ValueError("Laurent literals hold fractional parts only (negative t-exponents)")
        if td < floor:
            raise InsufficientPrecision(f"t^{td} lies below the floor {floor}")
        if sd <= m:
            digits[sd][-td - 1] = field.add(digits[sd][-td - 1], coeff)
    return JetLaurent.from_digits(field, digits)


def _coeff_factors(field, c):
    """Factor lists whose sum is c: one per nonzero power-basis coordinate."""
    if field.k == 1:
        return [[] if c == 1 else [str(c)]]
    out = []
    for r, a in enumerate(field.coords(c)):
        if a:
            f = [] if a == 1 else [str(a)]
            if r:
                f.append("g" if r == 1 else f"g^{r}")
            out.append(f)
    return out


def format_jet(obj):
    """Literal string for a JetPoly or JetLaurent, parseable back."""
    terms = []
    if isinstance(obj, JetPoly):
        items = [(i, j, c) for i, r in enumerate(obj.rows) for j, c in enumerate(r)]
    else:
        items = [(-u, i, c) for i, row in enumerate(obj.digits()) for u, c in enumerate(row, start=1)]
    for tdeg, sdeg, c in items:
        if not c:
            continue
        tail = []
        if sdeg:
            tail.append("s" if sdeg == 1 else f"s^{sdeg}")
        if tdeg:
            tail.append("t" if tdeg == 1 else f"t^{tdeg}")
        for factors in _coeff_factors(obj.field, c):
            terms.append("*".join(factors + tail) or "1")
    return " + ".join(terms) or "0"


def vector_norm_abs(xs):
    """|x|_m of a vector: the maximum over its entries."""
    return max((norm_abs(x) for x in xs), default=NEG_INF)


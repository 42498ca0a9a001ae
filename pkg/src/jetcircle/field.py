"""Finite fields F_q, the additive character e_q, and exact root-of-unity sums.

Field elements are encoded as integers ``0 <= code < q``: the code of
``c_0 + c_1 g + ... + c_{k-1} g^{k-1}`` (``g`` a root of the defining
modulus) is ``sum c_i p**i``.  Scalar methods take and return Python ints;
the ``v``-prefixed methods take numpy integer arrays.

Character values are never floats.  A sum of p-th roots of unity is kept as a
:class:`RootSum`, an element of the group ring Z[Z/p], and compared exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import FieldMismatch

_ADD_TABLE_MAX = 1024


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    return all(n % f for f in range(3, math.isqrt(n) + 1, 2))


def factorize(n):
    """Prime factors of n by trial division, as a sorted list without repeats."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over F_p as coefficient tuples, constant term first ---------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a, b, p):
    a = _trim(a)
    b = _trim(b)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _trim(a)
    return a


def is_irreducible(modulus, p):
    """Exhaustive check that no monic polynomial of degree <= k/2 divides ``modulus``."""
    f = _trim([c % p for c in modulus])
    k = len(f) - 1
    if k < 1:
        return False
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not _poly_rem(f, list(low) + [1], p):
                return False
    return True


def find_irreducible(p, k):
    """First monic irreducible of degree k in lexicographic order of its low coefficients."""
    if k == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=k):
        if low[0] == 0:
            continue
        cand = tuple(reversed(low)) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {k} over F_{p}")


class FiniteField:
    """The field F_q, q = p^k, presented as F_p[g]/(modulus).

    For k = 1 the modulus is the placeholder ``x`` and ``g`` is unused.  A
    user-supplied modulus is checked for irreducibility at construction.
    """

    def __init__(self, p, k=1, modulus=None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be positive")
        if modulus is None:
            modulus = find_irreducible(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if k == 1:
            if len(modulus) != 2 or modulus[1] != 1:
                raise ValueError("prime field modulus must be monic of degree 1")
            modulus = (0, 1)
        else:
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise ValueError(f"modulus must be monic of degree {k}")
            if not is_irreducible(modulus, p):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.k = k
        self.modulus = modulus
        self.q = p**k
        self._build_tables()

    # construction -----------------------------------------------------------

    def _mulmod(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                prod[deg] = 0
                for i in range(k):
                    prod[deg - k + i] = (prod[deg - k + i] - c * self.modulus[i]) % p
        return prod[:k]

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        self.radix = np.array([p**i for i in range(k)], dtype=np.int64)
        codes = np.arange(q, dtype=np.int64)
        self.coords_table = (codes[:, None] // self.radix[None, :]) % p
        coord_lists = [tuple(int(c) for c in row) for row in self.coords_table]

        if q == 2:
            gen = 1
        else:
            odd_factors = factorize(q - 1)
            gen = None
            for cand in range(2, q):
                c = coord_lists[cand]
                if all(tuple(self._pow_coords(c, (q - 1) // f)) != coord_lists[1] for f in odd_factors):
                    gen = cand
                    break
        exp = [0] * (q - 1)
        cur = coord_lists[1]
        gcoords = coord_lists[gen]
        for i in range(q - 1):
            exp[i] = sum(c * p**j for j, c in enumerate(cur))
            cur = self._mulmod(cur, gcoords)
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self.primitive = gen
        self._exp = exp
        self._log = log
        self._exp_np = np.array(exp + exp, dtype=np.int64)
        self._log_np = np.array(log, dtype=np.int64)

        self._add_np = None
        if k > 1 and q <= _ADD_TABLE_MAX:
            summed = (self.coords_table[:, None, :] + self.coords_table[None, :, :]) % p
            self._add_np = summed @ self.radix
            self._add = self._add_np.tolist()

        # Tr(x) = x + x^p + ... + x^{p^{k-1}} on the basis g^r, extended F_p-linearly
        basis_traces = []
        for r in range(k):
            acc = [0] * k
            cur = [0] * r + [1] + [0] * (k - r - 1)
            for _ in range(k):
                acc = [(a + b) % p for a, b in zip(acc, cur)]
                cur = self._pow_coords(cur, p)
            if any(acc[1:]):
                raise ArithmeticError("trace left the prime field; modulus is not irreducible")
            basis_traces.append(acc[0])
        self._trace_np = (self.coords_table @ np.array(basis_traces, dtype=np.int64)) % p
        self._trace = self._trace_np.tolist()

    def _pow_coords(self, c, e):
        result = [1] + [0] * (self.k - 1)
        base = list(c)
        while e:
            if e & 1:
                result = self._mulmod(result, base)
            base = self._mulmod(base, base)
            e >>= 1
        return result

    # identity ---------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and self.p == other.p
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        if self.k == 1:
            return f"FiniteField({self.p})"
        return f"FiniteField({self.p}^{self.k}, modulus={self.modulus})"

    def spec_string(self):
        if self.k == 1:
            return str(self.p)
        return f"{self.p}^{self.k}:" + ",".join(map(str, self.modulus))

    # scalar arithmetic on codes ---------------------------------------------

    def coords(self, a):
        return tuple(int(c) for c in self.coords_table[a])

    def from_coords(self, cs):
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(cs))

    def from_int(self, n):
        """Image of the integer n in the prime subfield."""
        return n % self.p

    @property
    def generator(self):
        """Code of g, the class of x modulo the defining polynomial."""
        return self.p if self.k > 1 else 0

    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        if self._add_np is not None:
            return self._add[a][b]
        p = self.p
        out, r = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * r
            a //= p
            b //= p
            r *= p
        return out

    def neg(self, a):
        if self.k == 1:
            return -a % self.p
        p = self.p
        out, r = 0, 1
        while a:
            out += (-(a % p) % p) * r
            a //= p
            r *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.k == 1:
            return pow(a, -1, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow(self, a, e):
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def trace(self, a):
        return self._trace[a]

    # vectorized arithmetic on code arrays -----------------------------------

    def vadd(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        if self._add_np is not None:
            return self._add_np[a, b]
        s = (self.coords_table[a] + self.coords_table[b]) % self.p
        return s @ self.radix

    def vneg(self, a):
        if self.k == 1:
            return (-a) % self.p
        return ((-self.coords_table[a]) % self.p) @ self.radix

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        a = np.asarray(a)
        b = np.asarray(b)
        prod = self._exp_np[self._log_np[a] + self._log_np[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def vscale(self, c, a):
        """Multiply every code in ``a`` by the scalar code ``c``."""
        if c == 0:
            return np.zeros_like(a)
        if self.k == 1:
            return (a * c) % self.p
        return np.where(a == 0, 0, self._exp_np[self._log_np[a] + self._log[c]])

    def vtrace(self, a):
        return self._trace_np[a]

    def vcoords(self, a):
        """Coordinates over F_p; adds a trailing axis of length k."""
        return self.coords_table[a]

    # F_p-linear structure ---------------------------------------------------

    @cached_property
    def trace_form(self):
        """k x k matrix T with Tr(a b) = coords(a) @ T @ coords(b) mod p."""
        g = [self.from_coords([0] * r + [1]) for r in range(self.k)]
        return np.array(
            [[self.trace(self.mul(g[r], g[s])) for s in range(self.k)] for r in range(self.k)],
            dtype=np.int64,
        )

    def mul_matrix(self, a):
        """Matrix M over F_p with coords(a*b) = M @ coords(b) mod p."""
        cols = [self.coords(self.mul(a, self.from_coords([0] * r + [1]))) for r in range(self.k)]
        return np.array(cols, dtype=np.int64).T

    def element(self, value):
        if isinstance(value, FieldElem):
            self._check(value)
            return value
        if isinstance(value, (tuple, list)):
            return FieldElem(self, tuple(int(c) % self.p for c in value))
        return FieldElem(self, self.coords(int(value) % self.q if self.k == 1 else int(value)))

    def elements(self):
        return [FieldElem(self, self.coords(c)) for c in range(self.q)]

    def _check(self, x):
        if x.field != self:
            raise FieldMismatch(f"element of {x.field!r} used with {self!r}")


@dataclass(frozen=True)
class FieldElem:
    """An element of F_q by its coordinates in the power basis of the modulus."""

    field: FiniteField
    coeffs: tuple

    def __post_init__(self):
        f = self.field
        if len(self.coeffs) != f.k or any(not 0 <= c < f.p for c in self.coeffs):
            raise ValueError(f"coefficients {self.coeffs} invalid for {f!r}")

    @property
    def code(self):
        return self.field.from_coords(self.coeffs)

    def _other(self, other):
        if isinstance(other, int):
            return self.field.from_int(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatch("operands over different fields")
        return other.code

    def _wrap(self, code):
        return FieldElem(self.field, self.field.coords(code))

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.sub(o, self.code))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.field.mul(self.code, o))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(self.field.neg(self.code))

    def __pow__(self, e):
        if e < 0:
            return self._wrap(self.field.pow(self.field.inv(self.code), -e))
        return self._wrap(self.field.pow(self.code, e))

    def inverse(self):
        return self._wrap(self.field.inv(self.code))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        if self.field.k == 1:
            return f"{self.coeffs[0]} (mod {self.field.p})"
        return f"FieldElem{self.coeffs}"


def ff_trace(x):
    """Absolute trace Tr_{F_q/F_p}(x) as a residue mod p."""
    return x.field.trace(x.code)


def char_eq(x):
    """e_q(x) = exp(2 pi i Tr(x)/p) as a single root of unity."""
    return RootSum.root(x.field.p, ff_trace(x))


@dataclass(frozen=True)
class RootSum:
    """Exact element sum_j counts[j] * zeta_p^j of Z[zeta_p].

    Two count vectors represent the same complex number iff they differ by a
    constant vector, since 1 + zeta + ... + zeta^{p-1} = 0 is the only
    relation.  Counts are Python ints and never wrap.
    """

    p: int
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != self.p:
            raise ValueError("need exactly p counts")

    @classmethod
    def zero(cls, p):
        return cls(p, (0,) * p)

    @classmethod
    def root(cls, p, j, mult=1):
        c = [0] * p
        c[j % p] = mult
        return cls(p, tuple(c))

    @classmethod
    def from_array(cls, p, arr):
        return cls(p, tuple(int(v) for v in arr))

    def _same(self, other):
        if not isinstance(other, RootSum) or other.p != self.p:
            raise FieldMismatch("root sums for different primes")

    def __add__(self, other):
        self._same(other)
        return RootSum(self.p, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __sub__(self, other):
        self._same(other)
        return RootSum(self.p, tuple(a - b for a, b in zip(self.counts, other.counts)))

    def __neg__(self):
        return RootSum(self.p, tuple(-a for a in self.counts))

    def scale(self, n):
        return RootSum(self.p, tuple(n * a for a in self.counts))

    def mul_root(self, j):
        """Multiply by zeta^j (rotate indices)."""
        p = self.p
        j %= p
        return RootSum(p, tuple(self.counts[(i - j) % p] for i in range(p)))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._same(other)
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.counts):
            if a:
                for j, b in enumerate(other.counts):
                    out[(i + j) % p] += a * b
        return RootSum(p, tuple(out))

    __rmul__ = __mul__

    def conj(self):
        """Complex conjugate: zeta^j -> zeta^{-j}."""
        p = self.p
        return RootSum(p, tuple(self.counts[(-i) % p] for i in range(p)))

    def normalized(self):
        """Canonical representative with min count zero."""
        lo = min(self.counts)
        return RootSum(self.p, tuple(c - lo for c in self.counts))

    def is_zero(self):
        return len(set(self.counts)) == 1

    def is_rational(self):
        return len(set(self.counts[1:])) <= 1

    def rational_value(self):
        """The integer value of a rational root sum."""
        if not self.is_rational():
            raise ValueError("root sum is not a rational integer")
        if self.p == 1:
            return self.counts[0]
        return self.counts[0] - self.counts[1]

    def __eq__(self, other):
        if not isinstance(other, RootSum) or other.p != self.p:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.p, self.normalized().counts))

    def complex(self):
        c = self.normalized().counts
        p = self.p
        re = math.fsum(n * math.cos(2 * math.pi * j / p) for j, n in enumerate(c) if n)
        im = math.fsum(n * math.sin(2 * math.pi * j / p) for j, n in enumerate(c) if n)
        return complex(re, im)

    def magnitude(self):
        """|sum counts[j] zeta^j| in double precision.

        Relative error is below 1e-12 while the normalized counts stay under
        2**53 and the value is not the result of heavy cancellation.
        """
        return abs(self.complex())

    def __repr__(self):
        return f"RootSum(p={self.p}, counts={list(self.counts)})"


def rootsum_add(a, b):
    return a + b


def rootsum_mul_root(a, j):
    return a.mul_root(j)


def rootsum_is_zero(a):
    return a.is_zero()


def rootsum_magnitude(a):
    return a.magnitude()


def parse_field(spec):
    """Parse ``"p"`` or ``"p^k:c0,c1,...,ck"`` (modulus, constant term first)."""
    text = str(spec).strip()
    try:
        if ":" in text:
            head, mod = text.split(":", 1)
            p_str, k_str = head.split("^")
            p, k = int(p_str), int(k_str)
            modulus = tuple(int(c) for c in mod.split(","))
            return FiniteField(p, k, modulus)
        if "^" in text:
            p_str, k_str = text.split("^")
            return FiniteField(int(p_str), int(k_str))
        return FiniteField(int(text))
    except ValueError as exc:
        raise ValueError(f"bad field spec {spec!r}: {exc}") from None


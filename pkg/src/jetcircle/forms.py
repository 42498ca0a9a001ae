"""Homogeneous forms F over F_q, their multilinear forms and gradient.

A form is given by monomial coefficients keyed by sorted 0-based index
tuples.  The symmetric tensor c_{i_1...i_d} spreads each monomial
coefficient evenly over the permutations of its indices, which needs the
orbit sizes (divisors of d!) to be invertible, i.e. char F_q > d.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import batch
from .errors import check_budget
from .field import FiniteField
from .jets import JetPoly, _coeff_factors, _parse_monomials


class FormSpec:
    """Degree-d form in n variables over ``field``.

    ``strict=False`` admits char F_q <= d; counting still works, but the
    symmetric tensor and multilinear forms are unavailable.
    """

    def __init__(self, field, n, d, monomials, strict=True):
        if n < 1 or d < 1:
            raise ValueError("need n >= 1 and d >= 1")
        clean = {}
        for idx, coef in monomials.items():
            idx = tuple(sorted(int(i) for i in idx))
            if len(idx) != d or not all(0 <= i < n for i in idx):
                raise ValueError(f"monomial {idx} does not fit n={n}, d={d}")
            c = field.add(clean.get(idx, 0), int(coef))
            if c:
                clean[idx] = c
            else:
                clean.pop(idx, None)
        self.char_ok = field.p > d
        if strict and not self.char_ok:
            raise ValueError(f"characteristic {field.p} must exceed the degree {d}")
        self.field = field
        self.n = n
        self.d = d
        self.monomials = dict(sorted(clean.items()))

    @classmethod
    def diagonal(cls, field, coeffs, d, strict=True):
        mons = {(i,) * d: field.from_int(int(c)) if isinstance(c, int) else c for i, c in enumerate(coeffs)}
        return cls(field, len(coeffs), d, mons, strict=strict)

    def __eq__(self, other):
        return (
            isinstance(other, FormSpec)
            and self.field == other.field
            and (self.n, self.d) == (other.n, other.d)
            and self.monomials == other.monomials
        )

    def __hash__(self):
        return hash((self.field, self.n, self.d, tuple(self.monomials.items())))

    def __repr__(self):
        return f"FormSpec(n={self.n}, d={self.d}, {self.spec_string()!r}, field={self.field!r})"

    def is_zero(self):
        return not self.monomials

    def is_diagonal(self):
        return all(len(set(idx)) == 1 for idx in self.monomials)

    def spec_string(self):
        if not self.monomials:
            return "0"
        parts = []
        for idx, c in self.monomials.items():
            sep = "," if self.n >= 10 else ""
            coef = "+".join("*".join(f) or "1" for f in _coeff_factors(self.field, c))
            parts.append(sep.join(str(i + 1) for i in idx) + "=" + coef)
        return ";".join(parts)

    def _need_char(self):
        if not self.char_ok:
            raise ValueError(f"characteristic {self.field.p} must exceed the degree {self.d}")

    @cached_property
    def tensor(self):
        """Symmetric coefficients keyed by sorted index tuples."""
        self._need_char()
        f = self.field
        out = {}
        for idx, coef in self.monomials.items():
            orbit = math.factorial(self.d)
            for v in set(idx):
                orbit //= math.factorial(idx.count(v))
            out[idx] = f.mul(coef, f.inv(f.from_int(orbit)))
        return out

    def coefficient(self, indices):
        """c_{i_1 ... i_d}, invariant under permutation of the indices."""
        return self.tensor.get(tuple(sorted(indices)), 0)

    @cached_property
    def psi_terms(self):
        """For each i, the nonzero (ordered index tuple, d! * c_{tuple, i}) pairs."""
        self._need_char()
        f = self.field
        dfact = f.from_int(math.factorial(self.d))
        out = [[] for _ in range(self.n)]
        for idx, c in self.tensor.items():
            for pos in set(range(self.d)):
                i = idx[pos]
                rest = idx[:pos] + idx[pos + 1 :]
                for perm in set(itertools.permutations(rest)):
                    out[i].append((perm, f.mul(dfact, c)))
        # each (perm, i) pair is produced once per choice of removed slot with value i
        dedup = []
        for terms in out:
            seen = {}
            for perm, c in terms:
                seen[perm] = c
            dedup.append(sorted(seen.items()))
        return dedup

    @cached_property
    def gradient_terms(self):
        """For each i, the monomials of dF/dx_i as (exponent vector, code)."""
        f = self.field
        out = []
        for i in range(self.n):
            terms = {}
            for idx, coef in self.monomials.items():
                e = idx.count(i)
                if not e:
                    continue
                exps = [idx.count(v) for v in range(self.n)]
                exps[i] -= 1
                key = tuple(exps)
                terms[key] = f.add(terms.get(key, 0), f.mul(coef, f.from_int(e)))
            out.append(sorted((k, c) for k, c in terms.items() if c))
        return out

    def blocks(self):
        """Partition of the variables into groups no monomial straddles."""
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for idx in self.monomials:
            for v in idx[1:]:
                parent[find(v)] = find(idx[0])
        groups = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def restrict(self, variables):
        """The sub-form on the given variables (monomials supported there)."""
        pos = {v: i for i, v in enumerate(variables)}
        mons = {tuple(pos[v] for v in idx): c for idx, c in self.monomials.items() if all(v in pos for v in idx)}
        return FormSpec(self.field, len(variables), self.d, mons, strict=False)

    def with_field(self, field, strict=True):
        """Same integer coefficients read in another prime field."""
        if self.field.k != 1 or field.k != 1:
            raise ValueError("coefficient transfer is defined between prime fields only")
        return FormSpec(field, self.n, self.d, {i: field.from_int(c) for i, c in self.monomials.items()}, strict=strict)


def parse_form(text, field, n=None, d=None, strict=True):
    """Parse ``"diag:a1,...,an"`` or ``"i1i2...id=c;..."`` (1-based indices).

    Index groups may also be comma separated (``"1,1,10=2"``), which is
    needed once n >= 10.  Coefficients use the literal syntax of the jet
    module (integers, ``g`` powers for extension fields).
    """
    text = text.strip()
    if text.startswith("diag:"):
        if d is None:
            raise ValueError("a diagonal form needs the degree d")
        coeffs = [_coeff(field, c) for c in text[5:].split(",")]
        if n is not None and n != len(coeffs):
            raise ValueError(f"diag form has {len(coeffs)} coefficients, expected n={n}")
        return FormSpec(field, len(coeffs), d, {(i,) * d: c for i, c in enumerate(coeffs)}, strict=strict)
    if text in ("0", "zero"):
        if n is None or d is None:
            raise ValueError("the zero form needs n and d")
        return FormSpec(field, n, d, {}, strict=strict)
    mons = {}
    for item in filter(None, (s.strip() for s in text.split(";"))):
        lhs, _, rhs = item.partition("=")
        if not rhs:
            raise ValueError(f"monomial {item!r} lacks '=coefficient'")
        lhs = lhs.strip()
        idx = tuple(int(i) - 1 for i in lhs.split(",")) if "," in lhs else tuple(int(ch) - 1 for ch in lhs)
        if min(idx) < 0:
            raise ValueError("indices are 1-based")
        key = tuple(sorted(idx))
        mons[key] = field.add(mons.get(key, 0), _coeff(field, rhs))
    if not mons:
        raise ValueError(f"empty form spec {text!r}")
    degs = {len(k) for k in mons}
    if len(degs) != 1:
        raise ValueError("form is not homogeneous")
    deg = degs.pop()
    if d is not None and d != deg:
        raise ValueError(f"form has degree {deg}, expected {d}")
    nvars = max(max(k) for k in mons) + 1
    if n is not None:
        if n < nvars:
            raise ValueError(f"form uses {nvars} variables, n={n}")
        nvars = n
    return FormSpec(field, nvars, deg, mons, strict=strict)


def _coeff(field, text):
    total = 0
    for coef, sd, td in _parse_monomials(field, text):
        if sd or td:
            raise ValueError(f"form coefficient {text!r} must be a field element")
        total = field.add(total, coef)
    return total


# -- scalar evaluation -----------------------------------------------------------

def _check_vec(form, xs, what="x"):
    if len(xs) != form.n:
        raise ValueError(f"{what} has {len(xs)} entries, form has n={form.n}")
    for x in xs:
        if x.field != form.field:
            raise ValueError(f"{what} lives over a different field")
    if len({x.m for x in xs}) > 1:
        raise ValueError(f"{what} mixes jet orders")


def eval_form(form, xs):
    """F(x) in O_m for an n-vector of JetPoly."""
    _check_vec(form, xs)
    m = xs[0].m
    out = JetPoly.zero(form.field, m)
    for idx, coef in form.monomials.items():
        term = JetPoly.monomial(form.field, m, coef)
        for v in idx:
            term = term * xs[v]
        out = out + term
    return out


def multilinear_psi(form, i, args):
    """d! sum c_{i_1..i_{d-1} i} x^(1)_{i_1} ... x^(d-1)_{i_{d-1}}."""
    if len(args) != form.d - 1:
        raise ValueError(f"need {form.d - 1} vector arguments, got {len(args)}")
    for a in args:
        _check_vec(form, a, "argument")
    m = args[0][0].m
    out = JetPoly.zero(form.field, m)
    for idx, coef in form.psi_terms[i]:
        term = JetPoly.monomial(form.field, m, coef)
        for k, v in enumerate(idx):
            term = term * args[k][v]
        out = out + term
    return out


def gradient(form, xs):
    """(dF/dx_1, ..., dF/dx_n) at x."""
    _check_vec(form, xs)
    m = xs[0].m
    out = []
    for terms in form.gradient_terms:
        acc = JetPoly.zero(form.field, m)
        for exps, coef in terms:
            term = JetPoly.monomial(form.field, m, coef)
            for v, e in enumerate(exps):
                for _ in range(e):
                    term = term * xs[v]
            acc = acc + term
        out.append(acc)
    return tuple(out)


# -- smoothness ----------------------------------------------------------------

@dataclass(frozen=True)
class SmoothnessVerdict:
    smooth: bool
    k_max: int
    points_checked: int
    witness: tuple | None = None
    witness_degree: int | None = None
    witness_field: str | None = None

    def to_dict(self):
        return {
            "smooth_up_to_k": self.k_max if self.smooth else None,
            "smooth": self.smooth,
            "points_checked": self.points_checked,
            "witness": list(self.witness) if self.witness else None,
            "witness_degree": self.witness_degree,
            "witness_field": self.witness_field,
        }


@lru_cache(maxsize=None)
def extension(field, k):
    """F_{q^k} containing ``field``, with the embedding of codes as an array."""
    if k == 1:
        return field, np.arange(field.q, dtype=np.int64)
    big = FiniteField(field.p, field.k * k)
    if field.k == 1:
        return big, np.arange(field.p, dtype=np.int64)
    # a root of the base modulus in the big field
    xs = np.arange(big.q, dtype=np.int64)
    acc = np.zeros_like(xs)
    for c in reversed(field.modulus):
        acc = big.vadd(big.vmul(acc, xs), np.full_like(xs, c))
    beta = int(np.nonzero(acc == 0)[0][0])
    powers = [1]
    for _ in range(field.k - 1):
        powers.append(big.mul(powers[-1], beta))
    emb = []
    for code in range(field.q):
        v = 0
        for r, c in enumerate(field.coords(code)):
            v = big.add(v, big.mul(c, powers[r]))
        emb.append(v)
    return big, np.array(emb, dtype=np.int64)


def smoothness_check(form, k_max=4, budget=None):
    """Search P^{n-1}(F_{q^k}), k <= k_max, for a zero of F where the gradient vanishes."""
    check_budget(form.field.q ** (k_max * form.n), budget, "smoothness search")
    n = form.n
    checked = 0
    for k in range(1, k_max + 1):
        big, emb = extension(form.field, k)
        embedded = _EmbeddedForm(form, emb)
        for lead in range(n):
            free = n - 1 - lead
            total = big.q**free
            step = max(1, (1 << 20) // max(1, n))
            for start in range(0, total, step):
                tail = batch.digit_grid(big.q, free, start, min(total, start + step))
                N = tail.shape[0]
                pts = np.zeros((N, n), dtype=np.int64)
                pts[:, lead] = 1
                pts[:, lead + 1 :] = tail
                X = pts[:, :, None, None]
                grads = batch.gradient_batch(form, X, field=big, coeff_map=lambda c: int(emb[c]))
                vals = batch.eval_form_batch(embedded, X, field=big)
                bad = (grads.reshape(N, -1) == 0).all(axis=1) & (vals.reshape(N, -1) == 0).all(axis=1)
                checked += N
                hits = np.nonzero(bad)[0]
                if hits.size:
                    w = tuple(int(c) for c in pts[hits[0]])
                    return SmoothnessVerdict(False, k_max, checked, w, k, big.spec_string())
    return SmoothnessVerdict(True, k_max, checked)


class _EmbeddedForm:
    """Monomials of a form with coefficients pushed into an extension field."""

    def __init__(self, form, emb):
        self.d = form.d
        self.monomials = {idx: int(emb[c]) for idx, c in form.monomials.items()}


@dataclass(frozen=True)
class DimensionReport:
    n: int
    d: int
    e: int
    mu_bar: int
    mu: int


def dimensions(n, d, e):
    """Expected dimensions n(e+1) - de - 5 and n(e+1) - de - 2."""
    mu_bar = n * (e + 1) - d * e - 5
    return DimensionReport(n, d, e, mu_bar, mu_bar + 3)

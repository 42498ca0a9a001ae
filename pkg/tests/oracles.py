"""Slow reference implementations used as test oracles.

Nothing here imports the package's arithmetic: field elements are coordinate
tuples multiplied as polynomials mod the modulus, jets and Laurent tails are
dicts {(s_deg, t_deg): coord tuple}, and character values are complex floats.
"""

import cmath
import itertools
import math


class RefField:
    def __init__(self, p, modulus):
        self.p = p
        self.modulus = tuple(modulus)
        self.k = len(modulus) - 1
        self.q = p**self.k

    def vec(self, code):
        out = []
        for _ in range(self.k):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(out)

    def code(self, vec):
        return sum(c * self.p**i for i, c in enumerate(vec))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        for deg in range(2 * k - 1, k - 1, -1):
            c = prod[deg]
            if c:
                for i in range(k + 1):
                    prod[deg - k + i] = (prod[deg - k + i] - c * self.modulus[i]) % p
        return tuple(prod[:k])

    def zero(self):
        return (0,) * self.k

    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def power(self, a, e):
        out = self.one()
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def trace(self, a):
        acc = self.zero()
        cur = a
        for _ in range(self.k):
            acc = self.add(acc, cur)
            cur = self.power(cur, self.p)
        assert not any(acc[1:])
        return acc[0]

    def elements(self):
        return [tuple(v) for v in itertools.product(range(self.p), repeat=self.k)]


def ref_field(field):
    return RefField(field.p, field.modulus)


# -- jets as dicts ------------------------------------------------------------

def dict_add(R, a, b):
    out = dict(a)
    for key, v in b.items():
        out[key] = R.add(out.get(key, R.zero()), v)
    return {k: v for k, v in out.items() if any(v)}


def dict_mul(R, a, b, m, keep=lambda t: True):
    out = {}
    for (s1, t1), v1 in a.items():
        for (s2, t2), v2 in b.items():
            s, t = s1 + s2, t1 + t2
            if s > m or not keep(t):
                continue
            out[(s, t)] = R.add(out.get((s, t), R.zero()), R.mul(v1, v2))
    return {k: v for k, v in out.items() if any(v)}


def poly_dict(R, jp):
    """JetPoly -> dict, through its public rows."""
    return {(j, i): R.vec(c) for i, row in enumerate(jp.rows) for j, c in enumerate(row) if c}


def laurent_dict(R, digits):
    """digits[i][u-1] is the coefficient of s^i t^-u."""
    return {(i, -u): R.vec(c) for i, row in enumerate(digits) for u, c in enumerate(row, start=1) if c}


def eval_monomials(R, monomials, xs, m):
    """sum_c c * prod x_i with monomials {index tuple: code}, xs dicts."""
    total = {}
    for idx, c in monomials.items():
        term = {(0, 0): R.vec(c)}
        for i in idx:
            term = dict_mul(R, term, xs[i], m)
        total = dict_add(R, total, term)
    return total


def zeta(p, j):
    return cmath.exp(2j * math.pi * (j % p) / p)


def psi(R, frac):
    """psi_m of a fractional dict: product of e_q(coefficient of t^-1) over s-components."""
    tr = sum(R.trace(v) for (s, t), v in frac.items() if t == -1)
    return zeta(R.p, tr)


def all_jet_vectors(R, m, n, e):
    """Every n-vector of dict jets with t-degree <= e."""
    slots = [(s, t) for t in range(e + 1) for s in range(m + 1)]
    elems = R.elements()
    one_var = []
    for vals in itertools.product(elems, repeat=len(slots)):
        one_var.append({k: v for k, v in zip(slots, vals) if any(v)})
    return itertools.product(one_var, repeat=n)


def ref_count(R, monomials, n, m, e):
    return sum(1 for xs in all_jet_vectors(R, m, n, e) if not eval_monomials(R, monomials, xs, m))


def ref_exp_sum(R, monomials, n, m, e, alpha_digits):
    a = laurent_dict(R, alpha_digits)
    total = 0j
    for xs in all_jet_vectors(R, m, n, e):
        fx = eval_monomials(R, monomials, xs, m)
        total += psi(R, dict_mul(R, a, fx, m, keep=lambda t: t < 0))
    return total


def rootsum_complex(counts):
    p = len(counts)
    return sum(c * zeta(p, j) for j, c in enumerate(counts))

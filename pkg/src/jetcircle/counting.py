"""Point counts N_m(e), jet-variety counts, the projective jet count and the exponent analysis."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import batch
from .arcs import ArcParams, alpha_class_chunks, circle_integral, layer_table
from .errors import NonIntegralResult, check_budget
from .expsums import psi_histogram
from .field import FiniteField
from .forms import eval_form, smoothness_check
from .jets import box_size, enumerate_jetpolys, shard_bounds
from .parallel import map_shards

GUARD_K_MAX = 2


def _params(F, e=None, m=None):
    out = {"q": F.field.q, "n": F.n, "d": F.d, "form": F.spec_string(), "field": F.field.spec_string()}
    if e is not None:
        out["e"] = e
    if m is not None:
        out["m"] = m
    return out


@dataclass(frozen=True)
class CountReport:
    params: dict
    value: int
    method: str
    runtime_ms: float
    warnings: tuple = ()

    def to_dict(self):
        return {
            "op": "count",
            "params": self.params,
            "value": self.value,
            "method": self.method,
            "runtime_ms": self.runtime_ms,
            "warnings": list(self.warnings),
        }


def _warnings(F):
    if not F.char_ok:
        return (f"characteristic {F.field.p} does not exceed the degree {F.d}",)
    return ()


def require_smooth(F, k_max=GUARD_K_MAX, budget=None):
    """Refuse inputs the geometric statements do not cover."""
    if F.is_zero():
        raise ValueError("the zero form is not smooth")
    if not F.char_ok:
        raise ValueError(f"characteristic {F.field.p} must exceed the degree {F.d}")
    verdict = smoothness_check(F, k_max, budget)
    if not verdict.smooth:
        raise ValueError(f"form is singular at {verdict.witness} over {verdict.witness_field}")
    return verdict


# -- N_m(e) ----------------------------------------------------------------------

def _zero_rows(vals):
    return ~vals.reshape(vals.shape[0], -1).any(axis=1)


def _enumerate_shard(F, e, m, start, stop):
    count = 0
    step = max(1, (1 << 20) // max(1, F.n * (m + 1) * (e + 1)))
    for lo in range(start, stop, step):
        X = batch.box_array(F.field, m, F.n, e + 1, lo, min(stop, lo + step))
        count += int(_zero_rows(batch.eval_form_batch(F, X)).sum())
    return count


def _count_enumerate(F, e, m, workers=1):
    total = box_size(F.field.q, m, F.n, e)
    shards = max(1, workers or 1)
    tasks = [(F, e, m) + shard_bounds(total, i, shards) for i in range(shards)]
    return sum(map_shards(_enumerate_shard, tasks, workers))


def _count_scalar(F, e, m):
    return sum(1 for x in enumerate_jetpolys(F.field, m, F.n, e, budget=10**12) if not eval_form(F, x))


def _block_histogram(F, block, e, m):
    """Distinct values of the sub-form on ``block`` as integer keys with counts."""
    sub = F.restrict(block)
    keys = []
    for X in batch.iter_box(F.field, m, len(block), e + 1):
        vals = batch.eval_form_batch(sub, X)
        keys.append(batch.encode_rows(F.field.q, vals.reshape(vals.shape[0], -1)))
    uniq, counts = np.unique(np.concatenate(keys), return_counts=True)
    return uniq, counts.astype(np.int64)


def _sum_histograms(field, width, h1, h2, budget):
    """Histogram of v1 + v2 over independent v1 ~ h1, v2 ~ h2."""
    (k1, c1), (k2, c2) = h1, h2
    check_budget(k1.size * k2.size, budget, "value convolution")
    v1 = batch.decode_keys(field.q, k1, width)
    v2 = batch.decode_keys(field.q, k2, width)
    sums = field.vadd(v1[:, None, :], v2[None, :, :]).reshape(-1, width)
    keys = batch.encode_rows(field.q, sums)
    weights = (c1[:, None] * c2[None, :]).ravel()
    uniq, inv = np.unique(keys, return_inverse=True)
    return uniq, np.bincount(inv.ravel(), weights=weights).astype(np.int64)


def _count_separable(F, e, m, budget):
    """Meet in the middle over variable-disjoint blocks: #{v1 + v2 = 0}."""
    field = F.field
    width = (m + 1) * (F.d * e + 1)
    hists = [_block_histogram(F, b, e, m) for b in F.blocks()]
    half = len(hists) // 2
    left, right = hists[:half] or [(np.zeros(1, dtype=np.int64), np.ones(1, dtype=np.int64))], hists[half:]

    def fold(hs):
        acc = hs[0]
        for h in hs[1:]:
            acc = _sum_histograms(field, width, acc, h, budget)
        return acc

    lk, lc = fold(left)
    rk, rc = fold(right)
    neg = batch.encode_rows(field.q, field.vneg(batch.decode_keys(field.q, rk, width)))
    order = np.argsort(lk)
    pos = np.searchsorted(lk, neg, sorter=order)
    pos = np.minimum(pos, lk.size - 1)
    hit = lk[order[pos]] == neg
    return int((lc[order[pos[hit]]] * rc[hit]).sum())


def count_direct_Nm(F, e, m, budget=None, method="auto", workers=1):
    """N_m(e) by direct counting.

    ``"enumerate"`` evaluates F on the whole box; ``"separable"`` combines
    value histograms of variable-disjoint blocks of F; ``"scalar"`` uses the
    object-level arithmetic.  ``"auto"`` enumerates small boxes.  Only
    enumeration is sharded over ``workers``; the count does not depend on it.
    """
    t0 = time.perf_counter()
    points = box_size(F.field.q, m, F.n, e)
    if method == "auto":
        method = "separable" if len(F.blocks()) > 1 and points > 10**6 else "enumerate"
    if method == "separable":
        for b in F.blocks():
            check_budget(box_size(F.field.q, m, len(b), e), budget, "block enumeration")
        value = _count_separable(F, e, m, budget)
    else:
        check_budget(points, budget, "N_m(e)")
        if method == "enumerate":
            value = _count_enumerate(F, e, m, workers)
        elif method == "scalar":
            value = _count_scalar(F, e, m)
        else:
            raise ValueError(f"unknown method {method!r}")
    ms = (time.perf_counter() - t0) * 1000
    return CountReport(_params(F, e, m), value, "direct/" + method, ms, _warnings(F))


def count_via_characters(F, e, m, budget=None):
    """N_m(e) as the discretized integral of S(alpha) over T^(m)."""
    t0 = time.perf_counter()
    res = circle_integral(F, e, m, "all", budget)
    ms = (time.perf_counter() - t0) * 1000
    return CountReport(_params(F, e, m), int(res.value), "characters", ms, _warnings(F))


# -- the jet scheme V_m ------------------------------------------------------------

def _basis_codes(field):
    return [field.from_coords([0] * r + [1]) for r in range(field.k)]


def count_jet_variety(F, m, budget=None, method="fiber"):
    """#V_m(F_q): (d-1)-tuples of vectors in R_m^n with Psi_i = 0 mod s^{m+1}.

    ``"fiber"`` fixes the first d-2 vectors, where the conditions are linear
    in the last one, and adds p^(nullity); ``"enumerate"`` walks all tuples.
    """
    field, n, d = F.field, F.n, F.d
    if method == "enumerate":
        check_budget(field.q ** ((m + 1) * n * (d - 1)), budget, "V_m enumeration")
        vals, counts = psi_histogram(F, m, 1)
        return int(counts[_zero_rows(vals)].sum())
    if method != "fiber":
        raise ValueError(f"unknown method {method!r}")
    if d == 1:
        return 1
    check_budget(field.q ** ((m + 1) * n * (d - 2)), budget, "V_m fibres")
    dim = n * (m + 1) * field.k
    # basis of R_m^n over F_p, as (dim, n, m+1, 1) code arrays
    basis = np.zeros((dim, n, m + 1, 1), dtype=np.int64)
    row = 0
    for v in range(n):
        for i in range(m + 1):
            for g in _basis_codes(field):
                basis[row, v, i, 0] = g
                row += 1
    total = 0
    prefixes = batch.iter_box(field, m, n * (d - 2), 1) if d > 2 else [np.zeros((1, 0, m + 1, 1), dtype=np.int64)]
    for prefix in prefixes:
        N = prefix.shape[0]
        Xs = [np.repeat(prefix[:, k * n : (k + 1) * n], dim, axis=0) for k in range(d - 2)]
        Xs.append(np.tile(basis, (N, 1, 1, 1)))
        vals = batch.psi_batch(F, Xs)[..., 0]  # (N*dim, n, m+1)
        cols = batch.coords_flat(field, vals).reshape(N, dim, -1)
        ranks = batch.batched_rank(cols.transpose(0, 2, 1), field.p)
        total += int((field.p ** (dim - ranks).astype(object)).sum())
    return total


def kappa_default(n, d, m):
    return 2 ** (n * (d - 1) * (m + 1))


def jet_dim_bound(n, d, m):
    m0 = -(-(m + 1) // (d - 1))
    return (m + 1) * n * (d - 1) - n * m0


@dataclass(frozen=True)
class JetDimensionReport:
    check: str
    m: int
    bound_exponent: int
    kappa: int
    kappa_note: str
    rows: tuple
    spread: float
    passed: bool

    def to_dict(self):
        return {
            "check": self.check,
            "m": self.m,
            "B": self.bound_exponent,
            "kappa": self.kappa,
            "kappa_note": self.kappa_note,
            "rows": [dict(r) for r in self.rows],
            "spread": self.spread,
            "pass": self.passed,
        }


def check_jet_dimension_bound(F, m, q_list, kappa=None, spread_limit=4, budget=None, method="fiber"):
    """#V_m(F_q) / q^B stays within a factor ``spread_limit`` across q and below kappa.

    B = (m+1)n(d-1) - n m_0 is the dimension bound for V_m.  F must have
    integer coefficients (a prime-field form); it is read in every F_q.
    """
    n, d = F.n, F.d
    B = jet_dim_bound(n, d, m)
    kappa = kappa_default(n, d, m) if kappa is None else kappa
    rows = []
    for q in q_list:
        Fq = F.with_field(FiniteField(q), strict=False)
        require_smooth(Fq, budget=budget)
        count = count_jet_variety(Fq, m, budget, method)
        ratio = Fraction(count, q**B)
        rows.append((("q", q), ("count", count), ("ratio", float(ratio)), ("within_kappa", ratio <= kappa)))
    ratios = [dict(r)["ratio"] for r in rows]
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    ok = spread <= spread_limit and all(dict(r)["within_kappa"] for r in rows)
    note = "engineering default 2^(n(d-1)(m+1)); the point-count constant is not explicit"
    return JetDimensionReport("jet scheme dimension", m, B, kappa, note, tuple(rows), spread, ok)


@dataclass(frozen=True)
class DiagonalReport:
    check: str
    m: int
    points_checked: int
    exhaustive: bool
    gradient_zeros: int
    violations: int
    counterexample: tuple | None
    passed: bool

    def to_dict(self):
        return {
            "check": self.check,
            "m": self.m,
            "points_checked": self.points_checked,
            "exhaustive": self.exhaustive,
            "gradient_zeros": self.gradient_zeros,
            "violations": self.violations,
            "counterexample": self.counterexample,
            "pass": self.passed,
        }


def check_diagonal_implication(F, m, sample_budget=None, rng=None, budget=None):
    """Every nonzero x in R_m^n with grad F(x) = 0 mod s^{m+1} has s-valuation l with l(d-1) >= m+1."""
    require_smooth(F, budget=budget)
    field, n, d = F.field, F.n, F.d
    total = field.q ** ((m + 1) * n)
    exhaustive = sample_budget is None or total <= sample_budget
    if exhaustive:
        check_budget(total, budget, "diagonal implication")
        chunks = batch.iter_box(field, m, n, 1)
    else:
        if rng is None:
            raise ValueError("sampling needs a seeded generator")
        chunks = [rng.integers(0, field.q, size=(sample_budget, n, m + 1, 1), dtype=np.int64)]
    checked = zeros = bad = 0
    example = None
    for X in chunks:
        checked += X.shape[0]
        G = batch.gradient_batch(F, X)
        kill = _zero_rows(G) & X.reshape(X.shape[0], -1).any(axis=1)
        if not kill.any():
            continue
        hits = X[kill][..., 0]  # (h, n, m+1)
        zeros += hits.shape[0]
        nz = hits.any(axis=1)  # (h, m+1): does s^i appear
        l = nz.argmax(axis=1)
        viol = l * (d - 1) < m + 1
        bad += int(viol.sum())
        if viol.any() and example is None:
            example = tuple(tuple(int(c) for c in v) for v in hits[viol][0])
    return DiagonalReport("gradient vanishing forces s-divisibility", m, checked, exhaustive, zeros, bad, example, bad == 0)


@dataclass(frozen=True)
class ProjectiveReport:
    params: dict
    raw: int
    quotient: int
    n_count: int
    bound: Fraction
    passed: bool

    def to_dict(self):
        return {
            "op": "projective",
            "params": self.params,
            "raw": self.raw,
            "quotient": self.quotient,
            "N": self.n_count,
            "bound": str(self.bound),
            "pass": self.passed,
        }


def count_projective_jets(F, e, m, budget=None):
    """x with F(x) = 0 mod s^{m+1}, deg_t x <= e, x != 0 mod s; and its quotient by the unit group."""
    field, q = F.field, F.field.q
    check_budget(box_size(q, m, F.n, e), budget, "projective jets")
    raw = total = 0
    for X in batch.iter_box(field, m, F.n, e + 1):
        zero = _zero_rows(batch.eval_form_batch(F, X))
        total += int(zero.sum())
        unit = X[:, :, 0, :].reshape(X.shape[0], -1).any(axis=1)
        raw += int((zero & unit).sum())
    units = (q - 1) * q**m
    if raw % units:
        raise NonIntegralResult(f"{raw} points are not a union of free orbits of size {units}")
    quotient = raw // units
    bound = Fraction(total, units)
    return ProjectiveReport(_params(F, e, m), raw, quotient, total, bound, quotient <= bound)


# -- the minor-arc vanishing step ---------------------------------------------------

@dataclass(frozen=True)
class MinorArcRow:
    J: int
    l: int
    r: int
    alpha_classes: int
    nonzero_psi_values: int
    violations: int
    counterexample: dict | None

    def to_dict(self):
        return {
            "J": self.J,
            "l": self.l,
            "r": self.r,
            "alpha_classes": self.alpha_classes,
            "nonzero_psi_values": self.nonzero_psi_values,
            "violations": self.violations,
            "counterexample": self.counterexample,
        }


def check_minor_arc_vanishing(F, e, m, budget=None):
    """Off M(J), every tuple counted by M_m(alpha, e+1, e+1-l) has all Psi_i = 0.

    For J = 0 .. M-1 and l = 1 + floor(J/(d-1)), runs over every depth-(de+1)
    class of alpha with alpha_0 outside M(J) (alpha_1 .. alpha_m free) and
    every tuple with deg_t < l whose Psi-vector is nonzero.
    """
    field, d, n = F.field, F.d, F.n
    params = ArcParams(d, e)
    P = params.depth
    table = layer_table(field, params, P)
    rows = []
    for J in range(0, params.M):
        l = 1 + J // (d - 1)
        if l > e + 1:
            raise ValueError(f"l = {l} exceeds e + 1")
        r = e + 1 - l
        b = (e + 1) + (d - 1) * r
        outside = np.nonzero(table > J)[0]
        classes = outside.size * field.q ** (m * P)
        check_budget(classes, budget, "alpha classes")
        check_budget(field.q ** ((m + 1) * n * (d - 1) * l), budget, "Psi tuples")
        vals, _ = psi_histogram(F, m, l)
        nonzero = vals[~_zero_rows(vals)]
        mats = []
        for v in nonzero:
            mats.append(np.vstack([batch.alpha_matrix(field, v[i], P, b) for i in range(n)]))
        bad = 0
        example = None
        for A in alpha_class_chunks(field, m, P, outside):
            for v, Mv in zip(nonzero, mats):
                ok = ((A @ Mv.T) % field.p == 0).all(axis=1)
                if ok.any():
                    bad += int(ok.sum())
                    if example is None:
                        example = {"alpha_coords": A[ok][0].tolist(), "psi": v.tolist()}
        rows.append(MinorArcRow(J, l, r, classes, int(nonzero.shape[0]), bad, example))
    return rows


# -- exponents -----------------------------------------------------------------------

def threshold_n(d, e):
    if e == 1:
        return (d * d + d - 4) * 2 ** (d - 1)
    return (d * e + 1) * (d - 1) * 2 ** (d - 1)


@dataclass(frozen=True)
class ExponentReport:
    n: int
    d: int
    e: int
    m: int
    m0: int
    M: int
    E: Fraction
    threshold_n: int
    verdict: bool

    def to_dict(self):
        return {
            "n": self.n,
            "d": self.d,
            "e": self.e,
            "m": self.m,
            "m0": self.m0,
            "M": self.M,
            "E": str(self.E),
            "threshold_n": self.threshold_n,
            "verdict": self.verdict,
        }


def exponent_analysis(n, d, e, m):
    """E = m(de+1) + 2d - 2 - n m_0 / 2^(d-1), exactly."""
    if d < 3 or e < 1 or m < 0:
        raise ValueError("need d >= 3, e >= 1, m >= 0")
    m0 = -(-(m + 1) // (d - 1))
    E = m * (d * e + 1) + 2 * d - 2 - Fraction(n * m0, 2 ** (d - 1))
    return ExponentReport(n, d, e, m, m0, ArcParams(d, e).M, E, threshold_n(d, e), E < 0)


@dataclass(frozen=True)
class GridReport:
    checked: int
    failures: tuple
    passed: bool

    def to_dict(self):
        return {"checked": self.checked, "failures": [dict(f) for f in self.failures], "pass": self.passed}


def exponent_grid_check(d_range, e_range, m_max):
    """E < 0 at n = threshold + 1, with the two case bounds and side conditions, exactly."""
    failures = []
    checked = 0
    for d in d_range:
        for e in e_range:
            n = threshold_n(d, e) + 1
            two = 2 ** (d - 1)
            conds = {
                "d2+d-4 >= (d+1)(d-1)": d * d + d - 4 >= (d + 1) * (d - 1),
                "n > (de+1)(d-1)2^(d-1)": n > (d * e + 1) * (d - 1) * two,
                "coefficient of m negative": d * e + 1 - Fraction(n, (d - 1) * two) < 0,
            }
            for name, ok in conds.items():
                if not ok:
                    failures.append((("d", d), ("e", e), ("condition", name)))
            for m in range(m_max + 1):
                checked += 1
                rep = exponent_analysis(n, d, e, m)
                if m + 1 <= d - 1:
                    case = (d - 2) * (d * e + 1) + 2 * (d - 1) - Fraction(n, two)
                else:
                    c = Fraction(n, (d - 1) * two)
                    case = m * (d * e + 1 - c) + 2 * (d - 1) - c
                if not (rep.E < 0 and rep.E <= case and case < 0):
                    failures.append((("d", d), ("e", e), ("m", m), ("E", str(rep.E)), ("case_bound", str(case))))
    return GridReport(checked, tuple(failures), not failures)


# -- asymptotic scan -----------------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    q: int
    N: int
    exponent: int
    ratio: float
    in_window: bool
    method: str

    def to_dict(self):
        return {"q": self.q, "N": self.N, "exponent": self.exponent, "ratio": self.ratio, "in_window": self.in_window, "method": self.method}


def asymptotic_scan(F, e, m, q_list, budget=None):
    """N_m(e) / q^{(m+1)(mu+1)} per q, with mu + 1 = n(e+1) - de - 1; window [q^-2, q^2]."""
    rows = []
    for q in q_list:
        Fq = F.with_field(FiniteField(q))
        require_smooth(Fq, budget=budget)
        rep = count_direct_Nm(Fq, e, m, budget)
        k = (m + 1) * (F.n * (e + 1) - F.d * e - 1)
        ratio = Fraction(rep.value) / Fraction(q) ** k
        ok = Fraction(1, q * q) <= ratio <= q * q
        rows.append(ScanRow(q, rep.value, k, float(ratio), ok, rep.method))
    return rows


__all__ = [
    "CountReport",
    "count_direct_Nm",
    "count_via_characters",
    "count_jet_variety",
    "check_jet_dimension_bound",
    "check_diagonal_implication",
    "count_projective_jets",
    "check_minor_arc_vanishing",
    "exponent_analysis",
    "exponent_grid_check",
    "asymptotic_scan",
    "threshold_n",
    "jet_dim_bound",
]

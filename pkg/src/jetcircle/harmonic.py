"""Exact orthogonality checks for psi_m over balls in K_inf^(m) and boxes in O_m.

Both checks pair digit vectors of alpha with coefficient vectors of x through
the F_p-bilinear phase psi_m(alpha x) = zeta^(A G X).  Two routes:

* explicit: the character sum is accumulated root by root for every
  parameter value (feasible while #parameters * #summands is moderate);
* factorized: the summation group is a product of F_p-lines, so the sum
  over it is the product of the one-coordinate sums.  The parameter space is
  covered by certifying the kernel of the linear map feeding those
  coordinates and evaluating the product at every point of its image.
  Seeded parameters are also summed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import batch

EXPLICIT_LIMIT = 3 * 10**8


@dataclass(frozen=True)
class OrthogonalityReport:
    check: str
    field: str
    m: int
    N: int
    depth: int
    parameters: int
    method: str
    mismatches: int
    counterexample: dict | None
    samples: int
    passed: bool

    def to_dict(self):
        return {
            "check": self.check,
            "field": self.field,
            "m": self.m,
            "N": self.N,
            "depth": self.depth,
            "parameters": self.parameters,
            "method": self.method,
            "mismatches": self.mismatches,
            "counterexample": self.counterexample,
            "samples": self.samples,
            "pass": self.passed,
        }


def pairing_matrix(field, m, P, D):
    """G with phase(alpha, x) = A . (G @ xc) mod p for depth-P alpha and deg_t x < D.

    xc are the F_p coordinates of x laid out as (s-power, t-power, coordinate).
    """
    dim = (m + 1) * D * field.k
    basis = np.zeros((dim, m + 1, D), dtype=np.int64)
    row = 0
    for i in range(m + 1):
        for v in range(D):
            for r in range(field.k):
                basis[row, i, v] = field.from_coords([0] * r + [1])
                row += 1
    return batch.dual_vectors(field, m, P, basis).T % field.p


def _row_mask(m1, D, k, keep):
    """Mask over (s, t, coordinate) layouts selecting t-positions where keep(t) holds."""
    mask = np.zeros((m1, D, k), dtype=bool)
    for t in range(D):
        if keep(t):
            mask[:, t, :] = True
    return mask.reshape(-1)


def _factor_sums(W, p):
    """For each row w: product over coordinates c of sum_{a in F_p} zeta^(a w_c), as counts."""
    U = W.shape[0]
    acc = np.zeros((U, p), dtype=np.int64)
    acc[:, 0] = 1
    shifts = np.arange(p)
    for c in range(W.shape[1]):
        wc = W[:, c] % p
        # sum_a zeta^(a wc): p at exponent 0 when wc = 0, else every exponent once
        fac = np.where((wc == 0)[:, None], np.eye(1, p, 0, dtype=np.int64) * p, np.ones((1, p), dtype=np.int64))
        new = np.zeros_like(acc)
        for j in range(p):
            new += acc[:, [(s - j) % p for s in shifts]] * fac[:, [j]]
        acc = new
    return acc


def _image_points(L, p):
    """Every vector in the column space of L (as rows)."""
    # (ker L^T)^perp is the column space of L
    basis = batch.nullspace_mod_p(batch.nullspace_mod_p(L.T, p), p)
    r = basis.shape[0]
    coeffs = batch.digit_grid(p, r)
    return (coeffs @ basis) % p


def _kernel_equals(L, sub_mask, p):
    """ker L equals the coordinate subspace {coordinates outside sub_mask vanish}."""
    if L.shape[0] == 0:
        return bool(sub_mask.all())
    if (L[:, sub_mask] % p).any():
        return False
    nullity = L.shape[1] - batch.rank_mod_p(L, p)
    return nullity == int(sub_mask.sum())


def _classify(counts, size):
    """+1 for size*zeta^0, 0 for a vanishing sum, -1 otherwise."""
    triv = (counts[:, 0] == size) & (counts[:, 1:] == 0).all(axis=1)
    zero = (counts == counts[:, :1]).all(axis=1)
    return np.where(triv, 1, np.where(zero, 0, -1))


def verify_integral_orthogonality(field, m, N, depth=None, method="auto", samples=200, rng=None):
    """Integral of psi_m(alpha x) over |alpha|_m < q^-N against q^{-(m+1)N} [|x|_m < q^N].

    alpha is discretized at ``depth`` (default N + 2) and x runs over every
    element of O_m with deg_t x < depth.
    """
    depth = N + 2 if depth is None else depth
    q, p, k, m1 = field.q, field.p, field.k, m + 1
    G = pairing_matrix(field, m, depth, depth)
    free = _row_mask(m1, depth, k, lambda t: t >= N)  # alpha digit u = t + 1 > N
    group = q ** (m1 * (depth - N))
    params = q ** (m1 * depth)
    vol = Fraction(1, q ** (m1 * N))
    A = batch.alpha_coords(field, batch.digit_grid(q, m1 * (depth - N)).reshape(-1, m1, depth - N))
    A_full = np.zeros((A.shape[0], m1, depth, k), dtype=np.int64)
    A_full[:, :, N:, :] = A.reshape(-1, m1, depth - N, k)
    A_full = A_full.reshape(A.shape[0], -1)

    def expected(xc):
        # |x|_m < q^N: no coefficient at t-degree >= N
        return ~(xc.reshape(xc.shape[0], m1, depth, k)[:, :, N:, :].any(axis=(1, 2, 3)))

    def explicit(xs):
        W = batch.dual_vectors(field, m, depth, xs)
        counts = batch.character_counts(W, A_full, np.ones(A_full.shape[0], dtype=np.int64), p)
        return _classify(counts, group)

    if method == "auto":
        method = "explicit" if params * group <= EXPLICIT_LIMIT else "factorized"
    bad = 0
    example = None
    if method == "explicit":
        for X in batch.iter_box(field, m, 1, depth):
            xc = batch.coords_flat(field, X[:, 0])
            got = explicit(X[:, 0])
            want = expected(xc).astype(np.int64)
            miss = got != want
            bad += int(miss.sum())
            if miss.any() and example is None:
                example = {"x_coords": xc[miss][0].tolist(), "class": int(got[miss][0])}
        n_samples = 0
    elif method == "factorized":
        L = G[free]
        sub = _row_mask(m1, depth, k, lambda t: t < N)
        if not _kernel_equals(L, sub, p):
            bad += 1
            example = {"reason": "kernel of the phase map differs from the ball |x| < q^N"}
        img = _image_points(L, p)
        cls = _classify(_factor_sums(img, p), group)
        zero = ~img.any(axis=1)
        miss = cls != zero.astype(np.int64)
        bad += int(miss.sum())
        if miss.any() and example is None:
            example = {"image_point": img[miss][0].tolist(), "class": int(cls[miss][0])}
        rng = rng if rng is not None else np.random.default_rng(0)
        xs = rng.integers(0, q, size=(samples, m1, depth), dtype=np.int64)
        xs[: samples // 2, :, N:] = 0  # half inside the ball
        miss = explicit(xs) != expected(batch.coords_flat(field, xs)).astype(np.int64)
        bad += int(miss.sum())
        n_samples = samples
    else:
        raise ValueError(f"unknown method {method!r}")
    return OrthogonalityReport(
        f"integral over |alpha| < q^-N equals {vol} on the ball, else 0",
        field.spec_string(), m, N, depth, params, method, bad, example, n_samples, bad == 0,
    )


def verify_box_orthogonality(field, m, N, depth=None, method="auto", samples=200, rng=None):
    """Sum of psi_m(alpha x) over |x|_m < q^N against q^{(m+1)N} [||alpha||_m < q^-N].

    alpha runs over every depth-``depth`` class (default N + 2).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    depth = N + 2 if depth is None else depth
    q, p, k, m1 = field.q, field.p, field.k, m + 1
    G = pairing_matrix(field, m, depth, N)
    group = q ** (m1 * N)
    params = q ** (m1 * depth)
    X = batch.box_array(field, m, 1, N)[:, 0]
    W = batch.dual_vectors(field, m, depth, X)

    def expected(ac):
        return ~(ac.reshape(ac.shape[0], m1, depth, k)[:, :, :N, :].any(axis=(1, 2, 3)))

    def explicit(ac):
        counts = batch.character_counts(ac, W, np.ones(W.shape[0], dtype=np.int64), p)
        return _classify(counts, group)

    if method == "auto":
        method = "explicit" if params * group <= EXPLICIT_LIMIT else "factorized"
    bad = 0
    example = None
    if method == "explicit":
        total = params
        step = max(1, (1 << 22) // max(1, group))
        for start in range(0, total, step):
            digits = batch.digit_grid(q, m1 * depth, start, min(total, start + step)).reshape(-1, m1, depth)
            ac = batch.alpha_coords(field, digits)
            got = explicit(ac)
            miss = got != expected(ac).astype(np.int64)
            bad += int(miss.sum())
            if miss.any() and example is None:
                example = {"alpha_coords": ac[miss][0].tolist(), "class": int(got[miss][0])}
        n_samples = 0
    elif method == "factorized":
        L = G.T  # alpha coords -> coefficients against each x coordinate
        sub = _row_mask(m1, depth, k, lambda t: t >= N)  # digits t^-(N+1) and below
        if not _kernel_equals(L, sub, p):
            bad += 1
            example = {"reason": "kernel of the phase map differs from ||alpha|| < q^-N"}
        img = _image_points(L, p)
        cls = _classify(_factor_sums(img, p), group)
        zero = ~img.any(axis=1)
        miss = cls != zero.astype(np.int64)
        bad += int(miss.sum())
        if miss.any() and example is None:
            example = {"image_point": img[miss][0].tolist(), "class": int(cls[miss][0])}
        rng = rng if rng is not None else np.random.default_rng(0)
        digits = rng.integers(0, q, size=(samples, m1, depth), dtype=np.int64)
        digits[: samples // 2, :, :N] = 0
        ac = batch.alpha_coords(field, digits)
        miss = explicit(ac) != expected(ac).astype(np.int64)
        bad += int(miss.sum())
        n_samples = samples
    else:
        raise ValueError(f"unknown method {method!r}")
    return OrthogonalityReport(
        f"sum over |x| < q^N equals q^{m1 * N} when ||alpha|| < q^-N, else 0",
        field.spec_string(), m, N, depth, params, method, bad, example, n_samples, bad == 0,
    )

"""Vectorized kernels over arrays of field codes.

Jet polynomials in bulk are arrays of shape ``(..., m + 1, D)``: axis -2 is
the power of s, axis -1 the power of t.  Everything here is exact integer
arithmetic; the character-sum kernel uses float64 matrix products only on
small integers, where every intermediate is exactly representable.
"""

from __future__ import annotations

import numpy as np

from .errors import DeskScaleOverflow, InsufficientPrecision

_CHUNK_ENTRIES = 1 << 22


def digit_grid(q, length, start=0, stop=None):
    """Rows ``start .. stop-1`` of the lexicographic listing of range(q)**length."""
    total = q**length
    if stop is None:
        stop = total
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, length), dtype=np.int64)
    for pos in range(length - 1, -1, -1):
        idx, out[:, pos] = np.divmod(idx, q)
    return out


def box_array(field, m, n, ncoeffs, start=0, stop=None):
    """n-vectors of O_m with ``ncoeffs`` t-coefficients, in enumerate_jetpolys order.

    Returns shape ``(N, n, m + 1, ncoeffs)``.
    """
    width = n * ncoeffs * (m + 1)
    if ncoeffs <= 0:
        return np.zeros((1, n, m + 1, 0), dtype=np.int64)
    grid = digit_grid(field.q, width, start, stop)
    return grid.reshape(-1, n, ncoeffs, m + 1).transpose(0, 1, 3, 2)


def box_count(q, m, n, ncoeffs):
    return q ** (n * max(ncoeffs, 0) * (m + 1))


def iter_box(field, m, n, ncoeffs, chunk=None):
    total = box_count(field.q, m, n, ncoeffs)
    if chunk is None:
        chunk = max(1, _CHUNK_ENTRIES // max(1, n * (m + 1) * max(ncoeffs, 1) * 8))
    for start in range(0, total, chunk):
        yield box_array(field, m, n, ncoeffs, start, min(total, start + chunk))


# -- jet polynomial arithmetic on arrays ---------------------------------------

def _pad(a, D):
    if a.shape[-1] >= D:
        return a
    pad = [(0, 0)] * (a.ndim - 1) + [(0, D - a.shape[-1])]
    return np.pad(a, pad)


def jp_add(field, a, b):
    D = max(a.shape[-1], b.shape[-1])
    return field.vadd(_pad(a, D), _pad(b, D))


def jp_scale(field, c, a):
    return field.vscale(c, a)


def jp_mul(field, a, b):
    """Product in O_m, truncated at s^{m+1}; t-length Da + Db - 1."""
    m1 = a.shape[-2]
    Da, Db = a.shape[-1], b.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (m1, Da + Db - 1)
    out = np.zeros(shape, dtype=np.int64)
    if field.k == 1:
        # accumulate without reduction; entries stay far below 2**62
        for i in range(m1):
            for j in range(m1 - i):
                bj = b[..., j, :]
                for u in range(Da):
                    out[..., i + j, u : u + Db] += a[..., i, u : u + 1] * bj
        return out % field.p
    for i in range(m1):
        for j in range(m1 - i):
            bj = b[..., j, :]
            for u in range(Da):
                prod = field.vmul(a[..., i, u : u + 1], bj)
                out[..., i + j, u : u + Db] = field.vadd(out[..., i + j, u : u + Db], prod)
    return out


def trim_t(a):
    """Drop trailing t-columns that vanish everywhere (keeps at least one)."""
    D = a.shape[-1]
    while D > 1 and not a[..., D - 1].any():
        D -= 1
    return a[..., :D]


def eval_form_batch(form, X, field=None):
    """F(x) for every row of X, shape (N, n, m+1, D) -> (N, m+1, d(D-1)+1)."""
    field = field or form.field
    N, n, m1, D = X.shape
    Dout = form.d * (D - 1) + 1
    out = np.zeros((N, m1, Dout), dtype=np.int64)
    powers = {}

    def power(var, e):
        key = (var, e)
        if key not in powers:
            if e == 1:
                powers[key] = X[:, var]
            else:
                powers[key] = jp_mul(field, power(var, e - 1), X[:, var])
        return powers[key]

    for idx, coef in form.monomials.items():
        exps = {}
        for v in idx:
            exps[v] = exps.get(v, 0) + 1
        term = None
        for v, e in sorted(exps.items()):
            pw = power(v, e)
            term = pw if term is None else jp_mul(field, term, pw)
        term = jp_scale(field, coef, term)
        out = jp_add(field, out, _pad(term, Dout))
    return out


def psi_batch(form, Xs):
    """The n multilinear forms at tuples: Xs is a list of d-1 arrays (N, n, m+1, D).

    Returns (N, n, m+1, (d-1)(D-1)+1).
    """
    field = form.field
    N, n, m1, D = Xs[0].shape
    Dout = (form.d - 1) * (D - 1) + 1
    out = np.zeros((N, n, m1, Dout), dtype=np.int64)
    prefix_cache = {}

    def prefix(idx):
        if idx not in prefix_cache:
            k = len(idx) - 1
            last = Xs[k][:, idx[-1]]
            prefix_cache[idx] = last if k == 0 else jp_mul(field, prefix(idx[:-1]), last)
        return prefix_cache[idx]

    for i, terms in enumerate(form.psi_terms):
        acc = np.zeros((N, m1, Dout), dtype=np.int64)
        for idx, coef in terms:
            acc = jp_add(field, acc, _pad(jp_scale(field, coef, prefix(idx)), Dout))
        out[:, i] = acc
    return out


def gradient_batch(form, X, field=None, coeff_map=None):
    """Partial derivatives at every row of X, shape (N, n, m+1, D)."""
    field = field or form.field
    N, n, m1, D = X.shape
    Dout = (form.d - 1) * (D - 1) + 1
    out = np.zeros((N, n, m1, Dout), dtype=np.int64)
    for i, terms in enumerate(form.gradient_terms):
        acc = np.zeros((N, m1, Dout), dtype=np.int64)
        for exps, coef in terms:
            if coeff_map is not None:
                coef = coeff_map(coef)
            term = None
            for v, e in enumerate(exps):
                for _ in range(e):
                    term = X[:, v] if term is None else jp_mul(field, term, X[:, v])
            if term is None:
                term = np.zeros((N, m1, 1), dtype=np.int64)
                term[:, 0, 0] = 1
            acc = jp_add(field, acc, _pad(jp_scale(field, coef, term), Dout))
        out[:, i] = acc
    return out


# -- keys and histograms --------------------------------------------------------

def encode_rows(q, arr):
    """Integer key for each row of a 2-d code array (mixed radix q)."""
    width = arr.shape[1]
    if width and q**width >= 2**62:
        raise DeskScaleOverflow(f"key space q^{width} exceeds 64 bits")
    keys = np.zeros(arr.shape[0], dtype=np.int64)
    for col in range(width):
        keys = keys * q + arr[:, col]
    return keys


def decode_keys(q, keys, width):
    out = np.empty((keys.size, width), dtype=np.int64)
    k = keys.copy()
    for col in range(width - 1, -1, -1):
        k, out[:, col] = np.divmod(k, q)
    return out


def histogram(rows):
    """Distinct rows of a 2-d array with their multiplicities."""
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    return uniq, counts.astype(np.int64)


# -- characters ------------------------------------------------------------------

def alpha_coords(field, digits):
    """F_p coordinates of alpha digit arrays (B, m+1, P) -> (B, (m+1) P k)."""
    c = field.vcoords(digits)
    return c.reshape(digits.shape[0], -1)


def dual_vectors(field, m, P, vals):
    """Dual of (U, m+1, Dv) polynomial values against depth-P alpha digits.

    For alpha with digits a[i][u] (coefficient of s^i t^-u) and x in O_m, the
    t^-1 coefficients of the s-components of alpha*x sum to
    sum_{i+j<=m} sum_u a[i][u] x[j][u-1], so psi_m(alpha x) = zeta^(A . W)
    with A = alpha_coords and W returned here.
    """
    U, m1, Dv = vals.shape
    if Dv > P:
        extra = vals[:, :, P:]
        if extra.any():
            raise InsufficientPrecision(f"values of t-degree up to {Dv - 1} need alpha depth {Dv}, have {P}")
        vals = vals[:, :, :P]
        Dv = P
    p, k = field.p, field.k
    coords = field.vcoords(vals)  # (U, m+1, Dv, k)
    pref = np.cumsum(coords, axis=1) % p
    w = np.zeros((U, m1, P, k), dtype=np.int64)
    for i in range(m1):
        w[:, i, :Dv] = pref[:, m - i]
    if k > 1:
        w = (w @ field.trace_form.T) % p
    return w.reshape(U, -1)


def _chunk_rows(U, D):
    return max(1, _CHUNK_ENTRIES // max(1, U))


def _compress(A, W, weights):
    """Drop coordinates where every alpha vanishes and merge equal W rows."""
    live = A.any(axis=0)
    if live.all():
        return A, W, weights
    A, W = A[:, live], W[:, live]
    uniq, inv = np.unique(W, axis=0, return_inverse=True)
    merged = np.bincount(inv.ravel(), weights=weights, minlength=uniq.shape[0])
    return A, uniq, np.rint(merged).astype(np.int64)


def character_counts(A, W, weights, p):
    """counts[b, c] = sum of weights[u] over u with A[b] . W[u] = c (mod p)."""
    B = A.shape[0]
    weights = np.asarray(weights, dtype=np.int64)
    if int(weights.sum()) >= 2**53:
        raise DeskScaleOverflow("character sum weights exceed 2**53")
    out = np.zeros((B, p), dtype=np.int64)
    if W.shape[0] == 0:
        return out
    A, W, weights = _compress(A, W, weights)
    Wf = W.T.astype(np.float64)
    wf = weights.astype(np.float64)
    step = _chunk_rows(W.shape[0], W.shape[1])
    for start in range(0, B, step):
        Af = A[start : start + step].astype(np.float64)
        ph = np.fmod(Af @ Wf, p)
        for c in range(p):
            out[start : start + step, c] = np.rint((ph == c) @ wf).astype(np.int64)
    return out


def character_total(A, W, weights, p):
    """Column sums of character_counts(A, W, weights, p), computed in chunks."""
    weights = np.asarray(weights, dtype=np.int64)
    if int(weights.sum()) * max(1, A.shape[0]) >= 2**62:
        raise DeskScaleOverflow("accumulated character sum exceeds 64 bits")
    total = np.zeros(p, dtype=np.int64)
    if W.shape[0] == 0 or A.shape[0] == 0:
        return total
    A, W, weights = _compress(A, W, weights)
    Wf = W.T.astype(np.float64)
    step = _chunk_rows(W.shape[0], W.shape[1])
    for start in range(0, A.shape[0], step):
        Af = A[start : start + step].astype(np.float64)
        ph = np.fmod(Af @ Wf, p).astype(np.int64)
        w = np.broadcast_to(weights, ph.shape)
        total += np.bincount(ph.ravel(), weights=w.ravel(), minlength=p).astype(np.int64)
    return total


# -- linear algebra mod p ----------------------------------------------------------

def _inverse_table(p):
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    return inv


def batched_rank(mats, p):
    """Rank over F_p of every matrix in a (B, r, c) stack."""
    M = np.array(mats, dtype=np.int64) % p
    B, r, c = M.shape
    inv = _inverse_table(p)
    row = np.zeros(B, dtype=np.int64)
    rows = np.arange(r)
    for col in range(c):
        mask = (M[:, :, col] != 0) & (rows[None, :] >= row[:, None])
        has = np.nonzero(mask.any(axis=1))[0]
        if has.size == 0:
            continue
        piv = mask[has].argmax(axis=1)
        rr = row[has]
        top = M[has, rr].copy()
        M[has, rr] = M[has, piv]
        M[has, piv] = top
        pivot_rows = (M[has, rr] * inv[M[has, rr, col]][:, None]) % p
        M[has, rr] = pivot_rows
        factors = M[has, :, col].copy()
        factors[np.arange(has.size), rr] = 0
        M[has] = (M[has] - factors[:, :, None] * pivot_rows[:, None, :]) % p
        row[has] += 1
    return row


def rank_mod_p(mat, p):
    mat = np.asarray(mat, dtype=np.int64)
    if mat.size == 0:
        return 0
    return int(batched_rank(mat[None], p)[0])


def nullspace_mod_p(mat, p):
    """Basis (as rows) of {v : mat @ v = 0 mod p}."""
    M = np.array(mat, dtype=np.int64) % p
    r, c = M.shape
    inv = _inverse_table(p)
    pivots = []
    row = 0
    for col in range(c):
        if row == r:
            break
        nz = np.nonzero(M[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        M[[row, piv]] = M[[piv, row]]
        M[row] = (M[row] * inv[M[row, col]]) % p
        others = np.arange(r) != row
        M[others] = (M[others] - M[others, col][:, None] * M[row][None, :]) % p
        pivots.append(col)
        row += 1
    free = [j for j in range(c) if j not in pivots]
    basis = []
    for f in free:
        v = np.zeros(c, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-M[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), c)


# -- linear maps attached to products with alpha -------------------------------

def _mul_blocks(field):
    cache = {}

    def block(c):
        if c not in cache:
            cache[c] = field.mul_matrix(c)
        return cache[c]

    return block


def product_matrix(field, digits, deg, depth):
    """F_p matrix of y -> digits t^-1 .. t^-depth of alpha * y, for deg_t y <= deg.

    ``digits`` is the (m+1, P) code array of alpha.  Inputs are laid out as
    (s-power, t-power, coordinate), outputs as (s-power, t^-u, coordinate).
    """
    digits = np.asarray(digits, dtype=np.int64)
    m1, P = digits.shape
    k = field.k
    if depth + deg > P:
        raise InsufficientPrecision(f"digits down to t^-{depth + deg} needed, alpha has depth {P}")
    block = _mul_blocks(field)
    out = np.zeros((m1, depth, k, m1, deg + 1, k), dtype=np.int64)
    for kk in range(m1):
        for j in range(kk + 1):
            a = digits[kk - j]
            for u in range(1, depth + 1):
                for v in range(deg + 1):
                    c = int(a[u + v - 1])
                    if c:
                        out[kk, u - 1, :, j, v, :] = block(c)
    return out.reshape(m1 * depth * k, m1 * (deg + 1) * k)


def alpha_matrix(field, values, P, depth):
    """F_p matrix of alpha -> digits t^-1 .. t^-depth of alpha * y, for fixed y.

    ``values`` is the (m+1, D) code array of y; alpha ranges over depth-P
    digit arrays laid out as in :func:`alpha_coords`.
    """
    values = np.asarray(values, dtype=np.int64)
    m1, D = values.shape
    k = field.k
    nz = [v for v in range(D) if values[:, v].any()]
    if nz and depth + nz[-1] > P:
        raise InsufficientPrecision(f"digits down to t^-{depth + nz[-1]} needed, alpha has depth {P}")
    block = _mul_blocks(field)
    out = np.zeros((m1, depth, k, m1, P, k), dtype=np.int64)
    for kk in range(m1):
        for j in range(kk + 1):
            for v in nz:
                c = int(values[j, v])
                if not c:
                    continue
                for u in range(1, depth + 1):
                    out[kk, u - 1, :, kk - j, u + v - 1, :] = block(c)
    return out.reshape(m1 * depth * k, m1 * P * k)


def coords_flat(field, arr):
    """F_p coordinates of code arrays, flattened per leading row."""
    return field.vcoords(arr).reshape(arr.shape[0], -1)

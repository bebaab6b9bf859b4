"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

Public entry points dispatch on :func:`pseudospec._jit.jit_enabled`:

``scan_box(S, M, lo, hi, scale)``
    Visit every integer point ``m`` with ``|m|_inf <= M`` and keep those whose
    value ``scale * m^T S m`` falls in ``[lo, hi]``. Returns ``(values, points)``
    in lexicographic point order.

``extend_words(elems, last, gens)``
    One level of reduced-word expansion for a free group acting through pairs
    of 2x2 matrices. Letter ``2i`` is generator ``i``, ``2i+1`` its inverse.

``top_log_sv2(mats)``
    ``log`` of the top singular value of a stack of 2x2 matrices.

The ``*_numba`` and ``*_numpy`` variants are importable directly so the
benchmark and parity tests can run both in one process.
"""

import numpy as np

from ._jit import HAVE_NUMBA, jit_enabled, numba

__all__ = [
    "scan_box",
    "scan_box_numpy",
    "scan_box_numba",
    "extend_words",
    "extend_words_numpy",
    "extend_words_numba",
    "top_log_sv2",
    "top_log_sv2_numpy",
    "top_log_sv2_numba",
]


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _box_rest(n, M):
    """Lexicographic grid of the trailing ``n-1`` coordinates."""
    if n == 1:
        return np.zeros((1, 0), dtype=np.int64)
    axes = [np.arange(-M, M + 1, dtype=np.int64)] * (n - 1)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return grid.reshape(-1, n - 1)


def scan_box_numpy(S, M, lo, hi, scale):
    S = np.ascontiguousarray(S, dtype=np.float64)
    n = S.shape[0]
    rest = _box_rest(n, M)
    restf = rest.astype(np.float64)
    # m = (f, r):  Q = S00 f^2 + 2 f (S[0,1:] . r) + r^T S[1:,1:] r
    quad_rest = np.einsum("ki,ij,kj->k", restf, S[1:, 1:], restf) if n > 1 else np.zeros(1)
    cross = restf @ S[0, 1:] if n > 1 else np.zeros(1)
    vals_out = []
    pts_out = []
    for f in range(-M, M + 1):
        q = S[0, 0] * f * f + 2.0 * f * cross + quad_rest
        v = scale * q
        keep = (v >= lo) & (v <= hi)
        if not keep.any():
            continue
        k = int(keep.sum())
        pts = np.empty((k, n), dtype=np.int64)
        pts[:, 0] = f
        pts[:, 1:] = rest[keep]
        vals_out.append(v[keep])
        pts_out.append(pts)
    if not vals_out:
        return np.empty(0), np.empty((0, n), dtype=np.int64)
    return np.concatenate(vals_out), np.concatenate(pts_out)


def extend_words_numpy(elems, last, gens):
    n_letters = gens.shape[0]
    children = []
    lasts = []
    parents = []
    idx = np.arange(elems.shape[0])
    for a in range(n_letters):
        mask = last != (a ^ 1)
        sel = idx[mask]
        children.append(np.matmul(elems[sel], gens[a]))
        lasts.append(np.full(sel.shape[0], a, dtype=np.int64))
        parents.append(sel)
    out = np.concatenate(children)
    out_last = np.concatenate(lasts)
    out_parent = np.concatenate(parents)
    order = np.lexsort((out_last, out_parent))
    return out[order], out_last[order], out_parent[order]


def top_log_sv2_numpy(mats):
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    sigma1 = 0.5 * (np.hypot(a + d, c - b) + np.hypot(a - d, b + c))
    return np.log(sigma1)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _visit_slab(S, M, first, lo, hi, scale, vals, pts, offset, fill):
        # Odometer over m[1:n-1]; along the last coordinate x the form is
        # a x^2 + 2 b x + c, so each row costs O(n^2) once and O(1) per point.
        n = S.shape[0]
        m = np.empty(n, dtype=np.int64)
        m[0] = first
        for k in range(1, n):
            m[k] = -M
        last = n - 1
        a = S[last, last]
        count = 0
        while True:
            b = 0.0
            c = 0.0
            for i in range(last):
                b += S[last, i] * m[i]
                row = 0.0
                for j in range(last):
                    row += S[i, j] * m[j]
                c += m[i] * row
            if last == 0:
                b = 0.0
                c = 0.0
            lo_x = -M if last > 0 else first
            hi_x = M if last > 0 else first
            for x in range(lo_x, hi_x + 1):
                v = scale * ((a * x + 2.0 * b) * x + c)
                if v >= lo and v <= hi:
                    if fill:
                        vals[offset + count] = v
                        for k in range(last):
                            pts[offset + count, k] = m[k]
                        pts[offset + count, last] = x
                    count += 1
            k = last - 1
            while k >= 1:
                if m[k] < M:
                    m[k] += 1
                    break
                m[k] = -M
                k -= 1
            if k < 1:
                break
        return count

    @numba.njit(parallel=True, cache=True)
    def _scan_box_jit(S, M, lo, hi, scale):
        n = S.shape[0]
        nslab = 2 * M + 1
        counts = np.zeros(nslab, dtype=np.int64)
        no_vals = np.empty(0)
        no_pts = np.empty((0, n), dtype=np.int64)
        for s in numba.prange(nslab):
            counts[s] = _visit_slab(S, M, s - M, lo, hi, scale, no_vals, no_pts, 0, False)
        offsets = np.zeros(nslab + 1, dtype=np.int64)
        for s in range(nslab):
            offsets[s + 1] = offsets[s] + counts[s]
        total = offsets[nslab]
        vals = np.empty(total)
        pts = np.empty((total, n), dtype=np.int64)
        for s in numba.prange(nslab):
            _visit_slab(S, M, s - M, lo, hi, scale, vals, pts, offsets[s], True)
        return vals, pts

    @numba.njit(cache=True)
    def _extend_words_jit(elems, last, gens):
        n_words = elems.shape[0]
        n_letters = gens.shape[0]
        size = 0
        for w in range(n_words):
            size += n_letters - (1 if last[w] >= 0 else 0)
        out = np.empty((size, 2, 2, 2))
        out_last = np.empty(size, dtype=np.int64)
        out_parent = np.empty(size, dtype=np.int64)
        c = 0
        for w in range(n_words):
            inv = last[w] ^ 1 if last[w] >= 0 else -1
            for a in range(n_letters):
                if a == inv:
                    continue
                for f in range(2):
                    a00 = elems[w, f, 0, 0]
                    a01 = elems[w, f, 0, 1]
                    a10 = elems[w, f, 1, 0]
                    a11 = elems[w, f, 1, 1]
                    b00 = gens[a, f, 0, 0]
                    b01 = gens[a, f, 0, 1]
                    b10 = gens[a, f, 1, 0]
                    b11 = gens[a, f, 1, 1]
                    out[c, f, 0, 0] = a00 * b00 + a01 * b10
                    out[c, f, 0, 1] = a00 * b01 + a01 * b11
                    out[c, f, 1, 0] = a10 * b00 + a11 * b10
                    out[c, f, 1, 1] = a10 * b01 + a11 * b11
                out_last[c] = a
                out_parent[c] = w
                c += 1
        return out, out_last, out_parent

    @numba.njit(cache=True)
    def _top_log_sv2_jit(mats):
        n = mats.shape[0]
        out = np.empty(n)
        for i in range(n):
            a = mats[i, 0, 0]
            b = mats[i, 0, 1]
            c = mats[i, 1, 0]
            d = mats[i, 1, 1]
            s = 0.5 * (np.hypot(a + d, c - b) + np.hypot(a - d, b + c))
            out[i] = np.log(s)
        return out


def scan_box_numba(S, M, lo, hi, scale):
    if not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    S = np.ascontiguousarray(S, dtype=np.float64)
    return _scan_box_jit(S, int(M), float(lo), float(hi), float(scale))


def extend_words_numba(elems, last, gens):
    if not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return _extend_words_jit(
        np.ascontiguousarray(elems, dtype=np.float64),
        np.ascontiguousarray(last, dtype=np.int64),
        np.ascontiguousarray(gens, dtype=np.float64),
    )


def top_log_sv2_numba(mats):
    if not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    flat = mats.reshape(-1, 2, 2)
    return _top_log_sv2_jit(flat).reshape(mats.shape[:-2])


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def scan_box(S, M, lo, hi, scale):
    if jit_enabled():
        return scan_box_numba(S, M, lo, hi, scale)
    return scan_box_numpy(S, M, lo, hi, scale)


def extend_words(elems, last, gens):
    if jit_enabled():
        return extend_words_numba(elems, last, gens)
    return extend_words_numpy(np.asarray(elems, dtype=np.float64), np.asarray(last), np.asarray(gens, dtype=np.float64))


def top_log_sv2(mats):
    if jit_enabled():
        return top_log_sv2_numba(mats)
    return top_log_sv2_numpy(np.asarray(mats, dtype=np.float64))

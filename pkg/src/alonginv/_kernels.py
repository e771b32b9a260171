"""Inner loops: one-sided Jacobi SVD, Hessenberg/QR eigenvalues, Z_n products.

All kernels take and return plain numpy arrays so they can be compiled by
numba or run as ordinary Python.  Errors are signalled through return flags
because the compiled path cannot raise rich exceptions.
"""

from __future__ import annotations

import numpy as np

from ._accel import kernel

_EPS = 2.220446049250313e-16


@kernel()
def jacobi_svd(a, max_sweeps):
    """One-sided (Hestenes) Jacobi SVD of a tall complex matrix ``a`` (m >= n).

    Returns ``(u, s, v, sweeps)`` with ``a = u @ diag(s) @ v^H``, singular
    values unsorted.  ``sweeps == max_sweeps + 1`` signals non-convergence.
    Columns are stored as rows of ``w`` so each rotation touches contiguous
    memory.
    """
    m, n = a.shape
    w = np.ascontiguousarray(a.T).copy()
    v = np.eye(n, dtype=np.complex128)
    tol = _EPS * m
    # columns this small are rounding noise; rotating them can cycle forever
    floor = _EPS * _EPS * np.sum(a.real * a.real + a.imag * a.imag)
    sweep = 0
    converged = False
    while sweep < max_sweeps:
        sweep += 1
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                x = w[i]
                y = w[j]
                alpha = np.sum(x.real * x.real + x.imag * x.imag)
                beta = np.sum(y.real * y.real + y.imag * y.imag)
                gamma = np.sum(np.conj(x) * y)
                g = abs(gamma)
                if g == 0.0 or g <= tol * np.sqrt(alpha * beta) or min(alpha, beta) <= floor:
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                xn = c * x - s * np.conj(phase) * y
                yn = s * phase * x + c * y
                w[i] = xn
                w[j] = yn
                vx = v[:, i].copy()
                vy = v[:, j].copy()
                v[:, i] = c * vx - s * np.conj(phase) * vy
                v[:, j] = s * phase * vx + c * vy
        if not rotated:
            converged = True
            break
    if not converged:
        sweep = max_sweeps + 1
    s_out = np.empty(n)
    u = np.zeros((m, n), dtype=np.complex128)
    for i in range(n):
        nrm = np.sqrt(np.sum(w[i].real * w[i].real + w[i].imag * w[i].imag))
        s_out[i] = nrm
        if nrm > 0.0:
            u[:, i] = w[i] / nrm
    return u, s_out, v, sweep


@kernel()
def hessenberg(a):
    """Householder reduction to upper Hessenberg form (similarity, in place on a copy)."""
    n = a.shape[0]
    h = a.copy()
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        nx = np.sqrt(np.sum(x.real * x.real + x.imag * x.imag))
        if nx == 0.0:
            continue
        x0 = x[0]
        ph = x0 / abs(x0) if x0 != 0 else 1.0 + 0.0j
        vv = x
        vv[0] = x0 + ph * nx
        nv = np.sqrt(np.sum(vv.real * vv.real + vv.imag * vv.imag))
        vv = vv / nv
        # H <- (I - 2vv^H) H (I - 2vv^H)
        blk = h[k + 1 :, :]
        proj = np.sum(np.conj(vv).reshape((-1, 1)) * blk, axis=0)
        h[k + 1 :, :] = blk - 2.0 * vv.reshape((-1, 1)) * proj.reshape((1, -1))
        blk = h[:, k + 1 :]
        proj = np.sum(blk * vv.reshape((1, -1)), axis=1)
        h[:, k + 1 :] = blk - 2.0 * proj.reshape((-1, 1)) * np.conj(vv).reshape((1, -1))
        h[k + 2 :, k] = 0.0
    return h


@kernel()
def hessenberg_qr_eigvals(h, max_iter_per_eig):
    """Shifted QR iteration on an upper Hessenberg matrix.

    Wilkinson shifts with an exceptional shift every 10 stalled iterations.
    Returns ``(eigenvalues, ok)``; ``ok`` is False when some eigenvalue did
    not deflate within ``max_iter_per_eig`` iterations.
    """
    h = h.copy()
    n = h.shape[0]
    eig = np.zeros(n, dtype=np.complex128)
    scale = np.sqrt(np.sum(h.real * h.real + h.imag * h.imag))
    if scale == 0.0:
        return eig, True
    cs = np.zeros(n, dtype=np.complex128)
    sn = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    it = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            ref = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if ref == 0.0:
                ref = scale
            if abs(h[lo, lo - 1]) <= _EPS * ref:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            it = 0
            continue
        it += 1
        if it > max_iter_per_eig:
            return eig, False
        if it % 10 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            p = h[hi - 1, hi - 1]
            q = h[hi - 1, hi]
            r = h[hi, hi - 1]
            s = h[hi, hi]
            half = 0.5 * (p - s)
            disc = np.sqrt(half * half + q * r)
            m1 = s - q * r / (half + disc) if half + disc != 0 else s
            m2 = s - q * r / (half - disc) if half - disc != 0 else s
            mu = m1 if abs(m1 - s) <= abs(m2 - s) else m2
        for k in range(lo, hi + 1):
            h[k, k] -= mu
        for k in range(lo, hi):
            x = h[k, k]
            y = h[k + 1, k]
            r = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
            if r == 0.0:
                c = 1.0 + 0.0j
                s = 0.0 + 0.0j
            else:
                c = x / r
                s = y / r
            cs[k] = c
            sn[k] = s
            row_k = h[k, k : hi + 1].copy()
            row_k1 = h[k + 1, k : hi + 1].copy()
            h[k, k : hi + 1] = np.conj(c) * row_k + np.conj(s) * row_k1
            h[k + 1, k : hi + 1] = -s * row_k + c * row_k1
        for k in range(lo, hi):
            c = cs[k]
            s = sn[k]
            top = min(k + 2, hi)
            col_k = h[lo : top + 1, k].copy()
            col_k1 = h[lo : top + 1, k + 1].copy()
            h[lo : top + 1, k] = c * col_k + s * col_k1
            h[lo : top + 1, k + 1] = -np.conj(s) * col_k + np.conj(c) * col_k1
        for k in range(lo, hi + 1):
            h[k, k] += mu
    return eig, True


def _product_codes_numpy(left, right, modulus):
    prod = np.einsum("aij,bjl->abil", left, right) % modulus
    size = prod.shape[2] * prod.shape[3]
    weights = np.int64(modulus) ** np.arange(size - 1, -1, -1, dtype=np.int64)
    return prod.reshape(left.shape[0], right.shape[0], size) @ weights


@kernel(fallback=_product_codes_numpy)
def product_codes(left, right, modulus):
    """Codes of every product ``left[i] @ right[j]`` mod ``modulus``.

    A matrix is encoded as its row-major entries read as base-``modulus``
    digits, most significant first.  Output shape ``(len(left), len(right))``.
    """
    na = left.shape[0]
    nb = right.shape[0]
    r = left.shape[1]
    inner = left.shape[2]
    c = right.shape[2]
    out = np.empty((na, nb), dtype=np.int64)
    for i in range(na):
        for j in range(nb):
            code = 0
            for p in range(r):
                for q in range(c):
                    acc = 0
                    for t in range(inner):
                        acc += left[i, p, t] * right[j, t, q]
                    code = code * modulus + acc % modulus
            out[i, j] = code
    return out


def _outer_inverse_mask_numpy(cands, a, modulus):
    bab = np.einsum("nij,jk,nkl->nil", cands, a, cands) % modulus
    return np.all(bab == cands, axis=(1, 2))


@kernel(fallback=_outer_inverse_mask_numpy)
def outer_inverse_mask(cands, a, modulus):
    """Flags ``cands[i] @ a @ cands[i] == cands[i]`` mod ``modulus``."""
    m = cands.shape[0]
    k = a.shape[0]
    out = np.zeros(m, dtype=np.bool_)
    ba = np.empty((k, k), dtype=np.int64)
    for i in range(m):
        b = cands[i]
        for r in range(k):
            for c in range(k):
                acc = 0
                for t in range(k):
                    acc += b[r, t] * a[t, c]
                ba[r, c] = acc % modulus
        ok = True
        for r in range(k):
            for c in range(k):
                acc = 0
                for t in range(k):
                    acc += ba[r, t] * b[t, c]
                if acc % modulus != b[r, c]:
                    ok = False
                    break
            if not ok:
                break
        out[i] = ok
    return out

"""Classical generalized inverses obtained as inverses along a chosen element.

group inverse       = inverse of a along a
Drazin inverse      = inverse of a along a^k, k the index
Moore-Penrose       = inverse of a along a*
weighted MP (m, n)  = inverse of a along n^-1 a* m
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadInnerInverse, InputError, NotInvertible, NotInvertibleAlong
from .mary import exists_along, inverse_along_block, make_problem
from .numeric import DEFAULT_TOL, Tolerance, adjoint, cmatrix, invert, op_norm, rank


@dataclass(frozen=True)
class WeightPair:
    m: np.ndarray
    n: np.ndarray
    sqrt_m: np.ndarray
    sqrt_n: np.ndarray
    m_inv: np.ndarray
    n_inv: np.ndarray


def _pd_sqrt(h: np.ndarray, name: str, tol: Tolerance) -> np.ndarray:
    if op_norm(h - adjoint(h)) > tol.eq_tol * max(1.0, op_norm(h)):
        raise InputError(f"weight {name} is not Hermitian")
    herm = 0.5 * (h + adjoint(h))
    vals, vecs = np.linalg.eigh(herm)
    if vals[0] < tol.rank_tol:
        raise InputError(f"weight {name} is not positive definite (min eigenvalue {vals[0]:.3e})")
    return (vecs * np.sqrt(np.maximum(vals, tol.rank_tol))) @ adjoint(vecs)


def make_weights(m, n, tol: Tolerance = DEFAULT_TOL) -> WeightPair:
    """Validate positive definite Hermitian weights and attach their square roots."""
    m, n = cmatrix(m), cmatrix(n)
    sm, sn = _pd_sqrt(m, "m", tol), _pd_sqrt(n, "n", tol)
    return WeightPair(m, n, sm, sn, invert(m, tol), invert(n, tol))


def identity_weights(k: int) -> WeightPair:
    return make_weights(np.eye(k), np.eye(k))


def group_inverse(a, tol: Tolerance = DEFAULT_TOL) -> Optional[np.ndarray]:
    """``a^#`` or None when ``a`` has index above 1."""
    a = cmatrix(a)
    prob = make_problem(a, a, tol=tol)
    if not exists_along(prob).exists:
        return None
    return inverse_along_block(prob).b


@dataclass(frozen=True)
class DrazinResult:
    ad: np.ndarray
    index: int


def drazin_index(a, tol: Tolerance = DEFAULT_TOL) -> int:
    """Least ``k >= 0`` with ``rank(a^(k+1)) = rank(a^k)``."""
    a = cmatrix(a)
    power = np.eye(a.shape[0], dtype=np.complex128)
    r = a.shape[0]
    for k in range(a.shape[0] + 1):
        nxt = power @ a
        r_next = rank(nxt, tol)
        if r_next == r:
            return k
        power, r = nxt, r_next
    return a.shape[0]  # pragma: no cover - ranks stabilise by k = n


def drazin_inverse(a, tol: Tolerance = DEFAULT_TOL) -> DrazinResult:
    a = cmatrix(a)
    k = drazin_index(a, tol)
    if k == 0:
        return DrazinResult(invert(a, tol), 0)
    ak = np.linalg.matrix_power(a, k)
    return DrazinResult(inverse_along_block(make_problem(a, ak, tol=tol)).b, k)


def drazin_residuals(a, res: DrazinResult) -> dict:
    a = cmatrix(a)
    ak = np.linalg.matrix_power(a, res.index)
    x = res.ad
    return {
        "power": op_norm(ak @ x @ a - ak),
        "outer": op_norm(x @ a @ x - x),
        "commute": op_norm(a @ x - x @ a),
    }


def moore_penrose_via_mary(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    a = cmatrix(a)
    return inverse_along_block(make_problem(a, adjoint(a), tol=tol)).b


def weighted_mp(a, w: WeightPair, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``a^dagger_{m,n}`` as the inverse of ``a`` along ``n^-1 a* m``."""
    a = cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise InputError("weighted Moore-Penrose is implemented for square a only")
    d = w.n_inv @ adjoint(a) @ w.m
    prob = make_problem(a, d, tol=tol)
    if not exists_along(prob).exists:
        # cannot happen for positive definite weights unless tolerances break
        raise NotInvertibleAlong("a is not invertible along n^-1 a* m at the current tolerance")
    return inverse_along_block(prob).b


def weighted_mp_residuals(a, x, w: WeightPair) -> dict:
    """Residuals of ``axa=a``, ``xax=x``, ``(max)*=max``, ``(nxa)*=nxa``."""
    max_ = w.m @ a @ x
    nxa = w.n @ x @ a
    return {
        "axa": op_norm(a @ x @ a - a),
        "xax": op_norm(x @ a @ x - x),
        "max_hermitian": op_norm(max_ - adjoint(max_)),
        "nxa_hermitian": op_norm(nxa - adjoint(nxa)),
    }


@dataclass(frozen=True)
class UVResult:
    u: np.ndarray
    v: np.ndarray
    u_invertible: bool
    v_invertible: bool
    x_from_u: Optional[np.ndarray]
    x_from_v: Optional[np.ndarray]


def weighted_mp_via_uv(a, w: WeightPair, z, tol: Tolerance = DEFAULT_TOL) -> UVResult:
    """Weighted MP through ``u = a*man^-1 + 1 - a*z`` and ``v = man^-1a* + 1 - za*``.

    ``z`` must be an inner inverse of ``a*``.
    """
    a, z = cmatrix(a), cmatrix(z)
    ah = adjoint(a)
    if op_norm(ah @ z @ ah - ah) > tol.eq_tol * max(1.0, op_norm(a)):
        raise BadInnerInverse("z is not an inner inverse of a*")
    ident = np.eye(a.shape[0], dtype=np.complex128)
    u = ah @ w.m @ a @ w.n_inv + ident - ah @ z
    v = w.m @ a @ w.n_inv @ ah + ident - z @ ah
    x_u = x_v = None
    try:
        x_u = w.n_inv @ invert(u, tol) @ ah @ w.m
    except NotInvertible:
        pass
    try:
        x_v = w.n_inv @ ah @ invert(v, tol) @ w.m
    except NotInvertible:
        pass
    return UVResult(u, v, x_u is not None, x_v is not None, x_u, x_v)

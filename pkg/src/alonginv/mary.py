"""The inverse of ``a`` along ``d``: existence, block route, spectral routes.

Everything works relative to an inner inverse ``g`` of ``d`` and the
idempotent ``p = d g``.  With respect to ``p`` the element
``v = dap + (1 - p)`` is block diagonal, so ``v`` is invertible exactly when
``dap`` is invertible in the corner ``pRp``; its corner inverse is
``w = p v^-1 p`` and the inverse along ``d`` is ``w d``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, NotInvertible, NotInvertibleAlong, SingularResolvent
from .inner import InnerInverse, mp_inner_inverse
from .numeric import DEFAULT_TOL, Tolerance, cmatrix, cond, invert, op_norm
from .spaces import range_equal, row_range_equal


class Method(str, enum.Enum):
    BLOCK = "block"
    SPECTRAL = "spectral"
    SPECTRAL_MIRROR = "spectral-mirror"
    LIMIT = "limit"
    LIMIT_MIRROR = "limit-mirror"
    SERIES = "series"
    INTEGRAL = "integral"
    INTEGRAL_MIRROR = "integral-mirror"


@dataclass(frozen=True)
class MaryProblem:
    a: np.ndarray
    d: np.ndarray
    dinv: InnerInverse
    tol: Tolerance = DEFAULT_TOL

    @property
    def p(self) -> np.ndarray:
        return self.dinv.p

    @property
    def q(self) -> np.ndarray:
        """``g d``, the idempotent used by the mirrored routes."""
        return self.dinv.q

    @property
    def g(self) -> np.ndarray:
        return self.dinv.g

    @property
    def n(self) -> int:
        return self.a.shape[0]


def make_problem(a, d, g=None, tol: Tolerance = DEFAULT_TOL) -> MaryProblem:
    """Build a :class:`MaryProblem`; ``g`` defaults to the Moore-Penrose inverse of ``d``.

    ``g`` may be a matrix or an :class:`InnerInverse`.
    """
    a, d = cmatrix(a), cmatrix(d)
    if a.shape[0] != a.shape[1] or a.shape != d.shape:
        raise InputError(f"a and d must be square of equal size, got {a.shape} and {d.shape}")
    if g is None:
        dinv = mp_inner_inverse(d, tol)
    elif isinstance(g, InnerInverse):
        dinv = g
    else:
        dinv = InnerInverse(d, cmatrix(g), tol)
    p = dinv.p
    scale = max(1.0, op_norm(p)) ** 2
    if op_norm(p @ p - p) > tol.eq_tol * scale or op_norm(p @ d - d) > tol.eq_tol * max(1.0, op_norm(d)) * scale:
        raise InputError("supplied g is not an inner inverse of d")
    return MaryProblem(a, d, dinv, tol)


@dataclass(frozen=True)
class ExistenceReport:
    exists: bool
    v: np.ndarray
    cond_v: float
    w: Optional[np.ndarray] = None


@dataclass(frozen=True)
class MaryResult:
    b: np.ndarray
    method: str
    residuals: dict
    cond: float = float("nan")
    history: tuple = ()
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .numeric import matrix_to_json

        return {
            "method": self.method,
            "matrix": matrix_to_json(self.b),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "cond": float(self.cond),
            "history": [dict(h) for h in self.history],
            "extra": {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in self.extra.items()},
        }


def residuals(a, d, b) -> dict:
    """Outer-inverse and two-sided absorption residuals of a candidate ``b``."""
    return {
        "outer": op_norm(b @ a @ b - b),
        "bad": op_norm(b @ a @ d - d),
        "dab": op_norm(d @ a @ b - d),
    }


def make_result(prob: MaryProblem, b, method, cond_est=float("nan"), history=(), **extra) -> MaryResult:
    return MaryResult(
        b=b,
        method=Method(method).value,
        residuals=residuals(prob.a, prob.d, b),
        cond=cond_est,
        history=tuple(history),
        extra=extra,
    )


def exists_along(prob: MaryProblem) -> ExistenceReport:
    a, d, p = prob.a, prob.d, prob.p
    ident = np.eye(prob.n, dtype=np.complex128)
    v = d @ a @ p + (ident - p)
    cond_v = cond(v)
    try:
        vinv = invert(v, prob.tol)
    except NotInvertible:
        return ExistenceReport(False, v, cond_v)
    return ExistenceReport(True, v, cond_v, p @ vinv @ p)


def _corner_inverse(prob: MaryProblem):
    rep = exists_along(prob)
    if not rep.exists:
        raise NotInvertibleAlong(f"dap is not invertible in pRp (cond(v) = {rep.cond_v:.3e})")
    return rep


def _mirror_corner_inverse(prob: MaryProblem):
    """Corner inverse ``w'`` of ``q a d`` in ``qRq`` with ``q = g d``."""
    a, d, q = prob.a, prob.d, prob.q
    ident = np.eye(prob.n, dtype=np.complex128)
    v = q @ a @ d + (ident - q)
    try:
        vinv = invert(v, prob.tol)
    except NotInvertible:
        raise NotInvertibleAlong(f"qad is not invertible in qRq (cond(v) = {cond(v):.3e})") from None
    return q @ vinv @ q, cond(v)


def inverse_along_block(prob: MaryProblem) -> MaryResult:
    rep = _corner_inverse(prob)
    return make_result(prob, rep.w @ prob.d, Method.BLOCK, rep.cond_v)


def group_inverse_da(prob: MaryProblem) -> np.ndarray:
    """``(da)^#`` from the corner inverse: ``w + w^2 da (1 - p)``."""
    w = _corner_inverse(prob).w
    da = prob.d @ prob.a
    ident = np.eye(prob.n, dtype=np.complex128)
    return w + w @ w @ da @ (ident - prob.p)


def group_inverse_ad(prob: MaryProblem) -> np.ndarray:
    """``(ad)^#`` through the opposite-product formulas: ``w' + (1 - q) ad w'^2``."""
    w, _ = _mirror_corner_inverse(prob)
    ad = prob.a @ prob.d
    ident = np.eye(prob.n, dtype=np.complex128)
    return w + (ident - prob.q) @ ad @ w @ w


def spectral_idempotent_da(prob: MaryProblem) -> np.ndarray:
    da = prob.d @ prob.a
    return np.eye(prob.n, dtype=np.complex128) - da @ group_inverse_da(prob)


def spectral_idempotent_ad(prob: MaryProblem) -> np.ndarray:
    ad = prob.a @ prob.d
    return np.eye(prob.n, dtype=np.complex128) - group_inverse_ad(prob) @ ad


def _check_t(t) -> complex:
    t = complex(t)
    if t == 0:
        raise InputError("t must be nonzero")
    return t


def inverse_along_spectral(prob: MaryProblem, t=1.0) -> MaryResult:
    """``(da + t (da)^pi)^-1 d`` for any nonzero scalar ``t``."""
    t = _check_t(t)
    resolvent = prob.d @ prob.a + t * spectral_idempotent_da(prob)
    try:
        inv = invert(resolvent, prob.tol)
    except NotInvertible as exc:
        raise SingularResolvent(f"da + t*pi not invertible for t={t}: {exc}") from None
    return make_result(prob, inv @ prob.d, Method.SPECTRAL, cond(resolvent), t=str(t))


def inverse_along_spectral_mirror(prob: MaryProblem, t=1.0) -> MaryResult:
    """``d (ad + t (ad)^pi)^-1``."""
    t = _check_t(t)
    resolvent = prob.a @ prob.d + t * spectral_idempotent_ad(prob)
    try:
        inv = invert(resolvent, prob.tol)
    except NotInvertible as exc:
        raise SingularResolvent(f"ad + t*pi not invertible for t={t}: {exc}") from None
    return make_result(prob, prob.d @ inv, Method.SPECTRAL_MIRROR, cond(resolvent), t=str(t))


def definition_check(a, d, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``bab = b`` together with equal column and row spaces of ``b`` and ``d``."""
    a, d, b = cmatrix(a), cmatrix(d), cmatrix(b)
    if op_norm(b @ a @ b - b) > tol.eq_tol * max(1.0, op_norm(b)):
        return False
    return range_equal(b, d, tol) and row_range_equal(b, d, tol)

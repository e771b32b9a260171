"""Inner inverses ``g`` of ``d`` (``d g d = d``), Moore-Penrose included."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numeric import DEFAULT_TOL, Tolerance, adjoint, cmatrix, op_norm, pinv


def _hermitian(m, tol: Tolerance) -> bool:
    return op_norm(m - adjoint(m)) <= tol.eq_tol * max(1.0, op_norm(m))


@dataclass(frozen=True)
class InnerInverse:
    d: np.ndarray
    g: np.ndarray
    tol: Tolerance = DEFAULT_TOL
    dd_minus_hermitian: bool = field(init=False)
    d_minus_d_hermitian: bool = field(init=False)

    def __post_init__(self):
        # flags are always recomputed from d and g
        object.__setattr__(self, "dd_minus_hermitian", _hermitian(self.d @ self.g, self.tol))
        object.__setattr__(self, "d_minus_d_hermitian", _hermitian(self.g @ self.d, self.tol))

    @property
    def p(self) -> np.ndarray:
        """The idempotent ``d g``."""
        return self.d @ self.g

    @property
    def q(self) -> np.ndarray:
        """The idempotent ``g d``."""
        return self.g @ self.d


def moore_penrose(d, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    return pinv(cmatrix(d), tol)


def is_inner_inverse(d, g, tol: Tolerance = DEFAULT_TOL) -> bool:
    d, g = cmatrix(d), cmatrix(g)
    if g.shape != (d.shape[1], d.shape[0]):
        return False
    return op_norm(d @ g @ d - d) <= tol.eq_tol * max(1.0, op_norm(d))


def random_unit_disc(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. samples uniform on the complex unit disc."""
    radius = np.sqrt(rng.uniform(0.0, 1.0, size=shape))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    return radius * np.exp(1j * angle)


def random_inner_inverse(d, seed: int, tol: Tolerance = DEFAULT_TOL) -> InnerInverse:
    """A generally non-Moore-Penrose inner inverse ``d+ + u - d+ d u d d+``."""
    d = cmatrix(d)
    rng = np.random.default_rng(seed)
    u = random_unit_disc(rng, (d.shape[1], d.shape[0]))
    dp = pinv(d, tol)
    g = dp + u - dp @ d @ u @ d @ dp
    return InnerInverse(d, g, tol)


def mp_inner_inverse(d, tol: Tolerance = DEFAULT_TOL) -> InnerInverse:
    d = cmatrix(d)
    return InnerInverse(d, pinv(d, tol), tol)

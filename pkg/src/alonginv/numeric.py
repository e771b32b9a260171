"""Dense complex matrix arithmetic: SVD, inverse, rank, spectrum, expm.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`cmatrix`
is the validating constructor.  The conjugate transpose plays the role of
the involution throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import ConvergenceError, InputError, NotInvertible

MAX_JACOBI_SWEEPS = 80
MAX_QR_ITER = 60


@dataclass(frozen=True)
class Tolerance:
    """Numerical cut-offs.

    rank_tol is relative to the largest singular value; eq_tol is used for
    residual and norm comparisons; conv_tol stops iterations.
    """

    rank_tol: float = 1e-10
    eq_tol: float = 1e-8
    conv_tol: float = 1e-12

    def __post_init__(self):
        for name in ("rank_tol", "eq_tol", "conv_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InputError(f"{name} must be a positive finite number, got {value!r}")

    def with_(self, **changes) -> "Tolerance":
        return replace(self, **changes)


DEFAULT_TOL = Tolerance()


def cmatrix(data) -> np.ndarray:
    """Validate and convert ``data`` to a 2-D finite complex128 array (always a copy)."""
    m = np.array(data, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise InputError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix entries must be finite")
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def eye_like(m: np.ndarray) -> np.ndarray:
    return np.eye(m.shape[0], dtype=np.complex128)


def _require_square(m: np.ndarray, what: str = "matrix") -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{what} must be square, got shape {m.shape}")


def svd(m: np.ndarray):
    """Thin SVD ``m = u @ diag(s) @ vh`` with ``s`` sorted in decreasing order."""
    m = np.ascontiguousarray(m, dtype=np.complex128)
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        k = min(rows, cols)
        return (np.zeros((rows, k), complex), np.zeros(k), np.zeros((k, cols), complex))
    wide = rows < cols
    work = np.ascontiguousarray(adjoint(m)) if wide else m
    u, s, v, sweeps = _kernels.jacobi_svd(work, MAX_JACOBI_SWEEPS)
    if sweeps > MAX_JACOBI_SWEEPS:
        raise ConvergenceError(f"Jacobi SVD did not converge in {MAX_JACOBI_SWEEPS} sweeps")
    order = np.argsort(-s, kind="stable")
    u, s, v = u[:, order], s[order], v[:, order]
    if wide:
        u, v = v, u
    return u, s, adjoint(v)


def singular_values(m: np.ndarray) -> np.ndarray:
    return svd(m)[1]


def op_norm(m: np.ndarray) -> float:
    """Spectral norm (largest singular value); 0 for empty or zero matrices."""
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def rank(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> int:
    s = singular_values(m)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s >= tol.rank_tol * s[0]))


def cond(m: np.ndarray) -> float:
    s = singular_values(m)
    if s.size == 0 or s[-1] == 0.0:
        return math.inf
    return float(s[0] / s[-1])


def cond_range(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> float:
    """Condition number on the range: largest over smallest retained singular value."""
    s = singular_values(m)
    if s.size == 0 or s[0] == 0.0:
        return 1.0
    kept = s[s >= tol.rank_tol * s[0]]
    return float(kept[0] / kept[-1])


def invert(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Inverse through the SVD; raises :class:`NotInvertible` below ``rank_tol``."""
    _require_square(m)
    u, s, vh = svd(m)
    if s.size == 0:
        return np.zeros_like(m, dtype=np.complex128)
    if s[0] == 0.0 or s[-1] < tol.rank_tol * s[0]:
        raise NotInvertible(
            f"smallest singular value {s[-1]:.3e} below {tol.rank_tol:.1e} x largest {s[0]:.3e}"
        )
    return (adjoint(vh) / s) @ adjoint(u)


def solve(m: np.ndarray, rhs: np.ndarray, tol: Tolerance = DEFAULT_TOL, right: bool = False) -> np.ndarray:
    """``m^-1 rhs`` (or ``rhs m^-1`` with ``right=True``) by pivoted LU.

    The invertibility gate is the same singular-value test as :func:`invert`;
    the LU solve itself is backward stable, which matters when ``m`` is close
    to the gate (resolvents at tiny shifts).
    """
    _require_square(m)
    s = singular_values(m)
    if s.size and (s[0] == 0.0 or s[-1] < tol.rank_tol * s[0]):
        raise NotInvertible(
            f"smallest singular value {s[-1]:.3e} below {tol.rank_tol:.1e} x largest {s[0]:.3e}"
        )
    rhs = np.asarray(rhs, dtype=np.complex128)
    if right:
        return np.linalg.solve(m.T, rhs.T).T
    return np.linalg.solve(m, rhs)


def pinv(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse with singular values below ``rank_tol * s_max`` dropped."""
    u, s, vh = svd(m)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    keep = s >= tol.rank_tol * s[0]
    return (adjoint(vh[keep]) / s[keep]) @ adjoint(u[:, keep])


def spectrum(m: np.ndarray) -> np.ndarray:
    """All eigenvalues with multiplicity (Hessenberg reduction + shifted QR)."""
    _require_square(m)
    if m.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    h = _kernels.hessenberg(np.ascontiguousarray(m, dtype=np.complex128))
    eig, ok = _kernels.hessenberg_qr_eigvals(h, MAX_QR_ITER)
    if not ok:
        raise ConvergenceError("shifted QR iteration failed to deflate all eigenvalues")
    return eig


def spectral_abscissa_nonzero(m: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Smallest real part among eigenvalues that are not numerically zero.

    Eigenvalues with modulus below ``sqrt(rank_tol) * max(1, ||m||)`` are
    treated as zero; defective zero eigenvalues split on that scale.
    Returns ``(abscissa, nonzero_eigs)``; abscissa is ``inf`` when there are none.
    """
    eig = spectrum(m)
    cut = math.sqrt(tol.rank_tol) * max(1.0, op_norm(m))
    nz = eig[np.abs(eig) > cut]
    if nz.size == 0:
        return math.inf, nz
    return float(np.min(nz.real)), nz


_PADE6 = tuple(
    math.factorial(12 - k) * math.factorial(6) / (math.factorial(12) * math.factorial(k) * math.factorial(6 - k))
    for k in range(7)
)


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a diagonal Pade(6) approximant."""
    _require_square(m)
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    if not np.any(m):
        return ident
    nrm = np.max(np.sum(np.abs(m), axis=0))
    squarings = max(0, int(math.ceil(math.log2(nrm / 0.5)))) if nrm > 0.5 else 0
    x = m / (2.0**squarings)
    num = _PADE6[0] * ident
    den = _PADE6[0] * ident
    power = ident
    for k in range(1, 7):
        power = power @ x
        num = num + _PADE6[k] * power
        den = den + ((-1) ** k) * _PADE6[k] * power
    r = np.linalg.solve(den, num)
    for _ in range(squarings):
        r = r @ r
    return r


def matrix_to_json(m: np.ndarray) -> dict:
    """``{"rows", "cols", "data": [[re, im], ...]}`` in row-major order.

    Floats are written with ``repr`` semantics, which round-trip exactly.
    """
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InputError("matrix JSON must be an object with rows, cols, data")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise InputError(f"matrix JSON missing field {key!r}")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 0 or cols < 0:
        raise InputError("fields 'rows' and 'cols' must be non-negative integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise InputError(f"field 'data' must hold rows*cols = {rows * cols} entries")
    vals = []
    for i, entry in enumerate(data):
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            vals.append(complex(entry))
        elif isinstance(entry, list) and len(entry) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry
        ):
            vals.append(complex(entry[0], entry[1]))
        else:
            raise InputError(f"field 'data' entry {i} must be [re, im]")
    return cmatrix(np.array(vals, dtype=np.complex128).reshape(rows, cols))

"""Column/row space comparisons by rank tests.

Over a field, ``xR = yR`` for square matrices is the same as equality of
column spaces, and ``Rx = Ry`` the same as equality of row spaces.
"""

from __future__ import annotations

import numpy as np

from .numeric import DEFAULT_TOL, Tolerance, rank


def _scaled(m):
    # rank tests are relative to the largest singular value, so both blocks
    # are normalised before stacking
    m = np.asarray(m, dtype=np.complex128)
    peak = np.max(np.abs(m)) if m.size else 0.0
    return m / peak if peak > 0 else m


def range_equal(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Column spaces of ``a`` and ``b`` coincide: rank(a) = rank(b) = rank([a b])."""
    a, b = _scaled(a), _scaled(b)
    ra, rb = rank(a, tol), rank(b, tol)
    return ra == rb and rank(np.hstack([a, b]), tol) == ra


def row_range_equal(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    a, b = _scaled(a), _scaled(b)
    ra, rb = rank(a, tol), rank(b, tol)
    return ra == rb and rank(np.vstack([a, b]), tol) == ra


def in_range(f, d, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every column of ``f`` lies in the column space of ``d`` (``f`` in ``dR``)."""
    f, d = _scaled(f), _scaled(d)
    if not np.any(f):
        return True
    return rank(np.hstack([d, f]), tol) == rank(d, tol)


def in_row_range(f, d, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every row of ``f`` lies in the row space of ``d`` (``f`` in ``Rd``)."""
    f, d = _scaled(f), _scaled(d)
    if not np.any(f):
        return True
    return rank(np.vstack([d, f]), tol) == rank(d, tol)


def null_space_equal(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Right kernels agree; equivalent to equal row spaces."""
    return row_range_equal(a, b, tol)


def left_null_space_equal(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    return range_equal(a, b, tol)

"""Exact matrices over Z_n and brute-force searches over M_k(Z_n).

The involution on Z_n is the identity, extended to matrices as the
transpose.  Module equalities such as ``bR = dR`` are decided by generating
both sets in full, so everything here is restricted to tiny sizes by an
enumeration budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, InputError

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class ZnScalar:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise InputError("modulus must be at least 2")
        object.__setattr__(self, "value", self.value % self.modulus)

    def __mul__(self, other: "ZnScalar") -> "ZnScalar":
        return ZnScalar(self.value * other.value, self.modulus)


def zn_square_roots(x: ZnScalar) -> set:
    """All ``y`` with ``y*y = x``; every element is Hermitian under the identity involution."""
    n = x.modulus
    return {ZnScalar(y, n) for y in range(n) if (y * y) % n == x.value}


class ZnMatrix:
    """Matrix over Z_n with exact integer entries in ``[0, n)``."""

    __slots__ = ("data", "modulus")

    def __init__(self, data, modulus: int):
        if int(modulus) < 2:
            raise InputError("modulus must be at least 2")
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2:
            raise InputError(f"expected a 2-D matrix, got shape {arr.shape}")
        self.modulus = int(modulus)
        self.data = arr % self.modulus
        self.data.setflags(write=False)

    @classmethod
    def identity(cls, k: int, modulus: int) -> "ZnMatrix":
        return cls(np.eye(k, dtype=np.int64), modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "ZnMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @property
    def shape(self):
        return self.data.shape

    @property
    def T(self) -> "ZnMatrix":
        return ZnMatrix(self.data.T, self.modulus)

    def _check(self, other: "ZnMatrix"):
        if not isinstance(other, ZnMatrix):
            return NotImplemented
        if other.modulus != self.modulus:
            raise InputError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
        return None

    def __matmul__(self, other: "ZnMatrix") -> "ZnMatrix":
        self._check(other)
        # python ints avoid int64 overflow for large moduli
        prod = self.data.astype(object) @ other.data.astype(object)
        return ZnMatrix(np.array(prod % self.modulus, dtype=np.int64), self.modulus)

    def __add__(self, other: "ZnMatrix") -> "ZnMatrix":
        self._check(other)
        return ZnMatrix(self.data + other.data, self.modulus)

    def __sub__(self, other: "ZnMatrix") -> "ZnMatrix":
        self._check(other)
        return ZnMatrix(self.data - other.data, self.modulus)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZnMatrix):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.modulus, self.shape, self.data.tobytes()))

    def __repr__(self):
        return f"ZnMatrix({self.data.tolist()}, modulus={self.modulus})"

    def code(self) -> int:
        """Row-major entries read as base-n digits (the enumeration index)."""
        c = 0
        for v in self.data.ravel():
            c = c * self.modulus + int(v)
        return c

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "rows": int(self.shape[0]),
            "cols": int(self.shape[1]),
            "data": [int(v) for v in self.data.ravel()],
        }

    @classmethod
    def from_json(cls, obj) -> "ZnMatrix":
        if not isinstance(obj, dict):
            raise InputError("ZnMatrix JSON must be an object")
        for key in ("modulus", "rows", "cols", "data"):
            if key not in obj:
                raise InputError(f"ZnMatrix JSON missing field {key!r}")
        n, r, c, data = obj["modulus"], obj["rows"], obj["cols"], obj["data"]
        if not isinstance(n, int) or n < 2:
            raise InputError("field 'modulus' must be an integer >= 2")
        if not isinstance(r, int) or not isinstance(c, int) or r < 1 or c < 1:
            raise InputError("fields 'rows' and 'cols' must be positive integers")
        if not isinstance(data, list) or len(data) != r * c or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in data
        ):
            raise InputError(f"field 'data' must be a list of {r * c} integers")
        return cls(np.array(data, dtype=np.int64).reshape(r, c), n)


def enumeration_cost(rows: int, cols: int, modulus: int) -> int:
    return rows * cols * modulus ** (rows * cols)


class ZnSpace:
    """All ``rows x cols`` matrices over Z_n, indexed by :meth:`ZnMatrix.code`.

    Caches the right and left principal modules ``xR`` and ``Rx`` of square
    elements so repeated searches over the same space stay cheap.
    """

    def __init__(self, rows: int, cols: int, modulus: int, budget: int = DEFAULT_BUDGET):
        cost = enumeration_cost(rows, cols, modulus)
        if cost > budget:
            raise BudgetExceeded(
                f"enumerating {rows}x{cols} matrices over Z_{modulus} costs {cost} > budget {budget}"
            )
        self.rows, self.cols, self.modulus = rows, cols, modulus
        size = rows * cols
        self.count = modulus**size
        codes = np.arange(self.count, dtype=np.int64)
        powers = np.int64(modulus) ** np.arange(size - 1, -1, -1, dtype=np.int64)
        self.elements = ((codes[:, None] // powers[None, :]) % modulus).reshape(-1, rows, cols)
        self._right: dict = {}
        self._left: dict = {}

    def matrix(self, code: int) -> ZnMatrix:
        return ZnMatrix(self.elements[code], self.modulus)

    def __iter__(self):
        for code in range(self.count):
            yield self.matrix(code)

    def right_module(self, x: ZnMatrix) -> frozenset:
        """Codes of ``{x y : y in M_k(Z_n)}``."""
        key = x.code()
        if key not in self._right:
            codes = _kernels.product_codes(x.data[None].copy(), self.elements, self.modulus)[0]
            self._right[key] = frozenset(np.unique(codes).tolist())
        return self._right[key]

    def left_module(self, x: ZnMatrix) -> frozenset:
        """Codes of ``{y x : y in M_k(Z_n)}``."""
        key = x.code()
        if key not in self._left:
            codes = _kernels.product_codes(self.elements, x.data[None].copy(), self.modulus)[:, 0]
            self._left[key] = frozenset(np.unique(codes).tolist())
        return self._left[key]


def zn_inner_inverses(d: ZnMatrix, budget: int = DEFAULT_BUDGET) -> list:
    """Every ``x`` with ``d x d = d``, in increasing code order."""
    r, c = d.shape
    space = ZnSpace(c, r, d.modulus, budget)
    dd = d.data
    dxd = np.einsum("ij,njk,kl->nil", dd, space.elements, dd) % d.modulus
    hits = np.nonzero(np.all(dxd == dd[None], axis=(1, 2)))[0]
    return [space.matrix(int(h)) for h in hits]


def _square_pair(a: ZnMatrix, d: ZnMatrix):
    if a.modulus != d.modulus:
        raise InputError("a and d must share the modulus")
    if a.shape[0] != a.shape[1] or a.shape != d.shape:
        raise InputError("a and d must be square of equal size")


def zn_mary_inverse(
    a: ZnMatrix, d: ZnMatrix, budget: int = DEFAULT_BUDGET, space: Optional[ZnSpace] = None
) -> Optional[ZnMatrix]:
    """Brute-force inverse of ``a`` along ``d``: the ``b`` with ``bab = b``, ``bR = dR``, ``Rb = Rd``.

    Candidates are restricted to ``dR`` intersected with ``Rd`` (``b`` lies in
    both modules), then filtered by ``bab = b`` and full module comparison.
    """
    _square_pair(a, d)
    k = a.shape[0]
    if space is None:
        space = ZnSpace(k, k, a.modulus, budget)
    d_right = space.right_module(d)
    d_left = space.left_module(d)
    codes = np.array(sorted(d_right & d_left), dtype=np.int64)
    outer = _kernels.outer_inverse_mask(space.elements[codes], a.data, a.modulus)
    found = None
    for code in codes[outer]:
        b = space.matrix(int(code))
        if space.right_module(b) == d_right and space.left_module(b) == d_left:
            if found is not None:  # pragma: no cover - uniqueness theorem
                raise AssertionError("inverse along d is not unique")
            found = b
    return found


def zn_det(m: ZnMatrix) -> int:
    """Determinant mod n by cofactor expansion (exact; tiny sizes only)."""

    def det(rows):
        if len(rows) == 1:
            return rows[0][0]
        total = 0
        for j, v in enumerate(rows[0]):
            if v:
                minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
                total += (-1) ** j * v * det(minor)
        return total

    if m.shape[0] != m.shape[1]:
        raise InputError("determinant needs a square matrix")
    return det([[int(v) for v in row] for row in m.data]) % m.modulus


def zn_invert(m: ZnMatrix) -> Optional[ZnMatrix]:
    """Inverse over Z_n via the adjugate, or None when ``det`` is not a unit."""
    n, k = m.modulus, m.shape[0]
    det = zn_det(m)
    if math.gcd(det, n) != 1:
        return None
    inv_det = pow(det, -1, n)
    adj = np.zeros((k, k), dtype=np.int64)
    if k == 1:
        adj[0, 0] = 1
    else:
        for i in range(k):
            for j in range(k):
                minor = np.delete(np.delete(m.data, i, axis=0), j, axis=1)
                adj[j, i] = (-1) ** (i + j) * zn_det(ZnMatrix(minor, n))
    return ZnMatrix((adj * inv_det) % n, n)


@dataclass(frozen=True)
class ZnExistence:
    exists: bool
    g: Optional[ZnMatrix]
    p: Optional[ZnMatrix]
    v: Optional[ZnMatrix]
    b: Optional[ZnMatrix]


def zn_exists_along(a: ZnMatrix, d: ZnMatrix, g: Optional[ZnMatrix] = None, budget: int = DEFAULT_BUDGET) -> ZnExistence:
    """Exact corner test: ``v = dap + (1 - p)`` invertible over Z_n, ``p = d g``.

    Without ``g`` the first inner inverse in code order is used; a
    non-regular ``d`` yields ``exists=False``.
    """
    _square_pair(a, d)
    if g is None:
        inner = zn_inner_inverses(d, budget)
        if not inner:
            return ZnExistence(False, None, None, None, None)
        g = inner[0]
    k, n = a.shape[0], a.modulus
    p = d @ g
    one = ZnMatrix.identity(k, n)
    v = d @ a @ p + (one - p)
    vinv = zn_invert(v)
    if vinv is None:
        return ZnExistence(False, g, p, v, None)
    w = p @ vinv @ p
    return ZnExistence(True, g, p, v, w @ d)


def zn_mary_table(k: int, modulus: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Brute-force inverse along ``d`` for every pair in ``M_k(Z_n)``.

    Entry ``[code(a), code(d)]`` is the code of ``a||d`` or -1.  For a fixed
    ``d`` the admissible ``b`` (``bR = dR``, ``Rb = Rd``) do not depend on
    ``a``; only the outer-inverse test ``bab = b`` is repeated per ``a``.
    """
    space = ZnSpace(k, k, modulus, budget)
    if space.count**2 > budget:
        raise BudgetExceeded(f"{space.count}^2 pairs over Z_{modulus} exceed budget {budget}")
    table = np.full((space.count, space.count), -1, dtype=np.int64)
    for dc in range(space.count):
        d = space.matrix(dc)
        d_right, d_left = space.right_module(d), space.left_module(d)
        admissible = [
            c
            for c in sorted(d_right & d_left)
            if space.right_module(space.matrix(c)) == d_right and space.left_module(space.matrix(c)) == d_left
        ]
        if not admissible:
            continue
        cands = space.elements[np.array(admissible, dtype=np.int64)]
        for ac in range(space.count):
            hits = np.nonzero(_kernels.outer_inverse_mask(cands, space.elements[ac], modulus))[0]
            if hits.size > 1:  # pragma: no cover - uniqueness theorem
                raise AssertionError("inverse along d is not unique")
            if hits.size:
                table[ac, dc] = admissible[int(hits[0])]
    return table


def zn_corner_table(k: int, modulus: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Same layout as :func:`zn_mary_table`, filled by the exact corner test."""
    space = ZnSpace(k, k, modulus, budget)
    table = np.full((space.count, space.count), -1, dtype=np.int64)
    for dc in range(space.count):
        d = space.matrix(dc)
        inner = zn_inner_inverses(d, budget)
        if not inner:
            continue
        for ac in range(space.count):
            rep = zn_exists_along(space.matrix(ac), d, inner[0], budget)
            if rep.exists:
                table[ac, dc] = rep.b.code()
    return table


def zn_units(k: int, modulus: int, budget: int = DEFAULT_BUDGET) -> list:
    """Invertible ``k x k`` matrices over Z_n with their inverses, in code order."""
    space = ZnSpace(k, k, modulus, budget)
    out = []
    for m in space:
        inv = zn_invert(m)
        if inv is not None:
            out.append((m, inv))
    return out

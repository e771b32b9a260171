"""Instance verifiers for identities and characterizations of the inverse along d.

Every verifier computes both sides of a statement by independent routes and
returns a :class:`VerdictReport`.  Characterizations of the form "P iff Q"
are checked as equivalences: the report holds when P and Q agree, whichever
way they both fall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classical import group_inverse
from .errors import PreconditionViolated
from .mary import exists_along, inverse_along_block, make_problem
from .numeric import DEFAULT_TOL, Tolerance, adjoint, cmatrix, cond, cond_range, invert, matrix_to_json, op_norm, pinv
from .spaces import in_range, in_row_range, range_equal, row_range_equal

__all__ = [
    "VerdictReport",
    "make_verdict",
    "verify_transform",
    "verify_mp_similarity",
    "verify_group_similarity",
    "verify_hermitian_products",
    "perturbation_identity",
    "verify_cota",
    "verify_involution",
    "continuity_experiment",
    "range_equal",
    "row_range_equal",
    "in_range",
    "in_row_range",
]


@dataclass
class VerdictReport:
    theorem_id: str
    holds: bool
    residuals: dict
    limits: dict = field(default_factory=dict)
    witness: Optional[dict] = None
    details: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def to_json(self) -> dict:
        out = {
            "theorem_id": self.theorem_id,
            "holds": bool(self.holds),
            "residuals": {k: _num(v) for k, v in self.residuals.items()},
            "seed": self.seed,
        }
        if self.witness:
            out["witness"] = {k: matrix_to_json(v) for k, v in self.witness.items()}
        return out


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def _verdict(theorem_id, checks: dict, witness=None, **details) -> VerdictReport:
    residuals = {k: float(v) for k, (v, _) in checks.items()}
    limits = {k: float(lim) for k, (_, lim) in checks.items()}
    holds = all(residuals[k] <= limits[k] for k in checks)
    return VerdictReport(theorem_id, holds, residuals, limits, None if holds else witness, details)


make_verdict = _verdict


def _rel(x, y) -> float:
    return op_norm(x - y) / max(1.0, op_norm(y))


def verify_transform(a, d, s, r, tol: Tolerance = DEFAULT_TOL, theorem_id="th28j") -> VerdictReport:
    """``(s a r^-1)`` along ``(r d s^-1)`` equals ``r (a||d) s^-1``."""
    a, d, s, r = map(cmatrix, (a, d, s, r))
    s_inv, r_inv = invert(s, tol), invert(r, tol)
    base = make_problem(a, d, tol=tol)
    rep = exists_along(base)
    if not rep.exists:
        raise PreconditionViolated("a is not invertible along d")
    rhs = r @ inverse_along_block(base).b @ s_inv
    moved = make_problem(s @ a @ r_inv, r @ d @ s_inv, tol=tol)
    moved_rep = exists_along(moved)
    if not moved_rep.exists:
        return _verdict(theorem_id, {"transformed_exists": (1.0, 0.0)}, {"a": a, "d": d, "s": s, "r": r})
    lhs = inverse_along_block(moved).b
    kappa = cond(s) * cond(r) * max(rep.cond_v, moved_rep.cond_v)
    return _verdict(
        theorem_id,
        {"identity": (_rel(lhs, rhs), tol.eq_tol * kappa)},
        {"a": a, "d": d, "s": s, "r": r, "lhs": lhs, "rhs": rhs},
    )


def verify_mp_similarity(a, s, r, tol: Tolerance = DEFAULT_TOL) -> VerdictReport:
    """Moore-Penrose inverse of ``s^-1 a r`` through an inverse along an element.

    (i)  ``(s^-1 a r)^+ = r^-1 a||(r r* a* (s s*)^-1) s``.
    (ii) ``(s^-1 a r)^+ = r^-1 a^+ s`` iff ``ss*a`` and ``a rr*`` share
         column and row spaces.
    """
    a, s, r = map(cmatrix, (a, s, r))
    s_inv, r_inv = invert(s, tol), invert(r, tol)
    x = s_inv @ a @ r
    direct = pinv(x, tol)
    f = r @ adjoint(r) @ adjoint(a) @ invert(s @ adjoint(s), tol)
    prob = make_problem(a, f, tol=tol)
    rep = exists_along(prob)
    kappa = (cond(s) * cond(r)) ** 2 * cond_range(x, tol)
    witness = {"a": a, "s": s, "r": r}
    if not rep.exists:
        return _verdict("mp-similarity", {"exists_along_f": (1.0, 0.0)}, witness)
    via_along = r_inv @ inverse_along_block(prob).b @ s
    identity = _rel(direct, via_along)
    naive = r_inv @ pinv(a, tol) @ s
    eq_holds = _rel(direct, naive) <= tol.eq_tol * kappa
    left, right = s @ adjoint(s) @ a, a @ r @ adjoint(r)
    ranges_hold = range_equal(left, right, tol) and row_range_equal(left, right, tol)
    return _verdict(
        "mp-similarity",
        {
            "identity_i": (identity, tol.eq_tol * kappa * max(1.0, rep.cond_v)),
            "biconditional_ii": (float(eq_holds != ranges_hold), 0.0),
        },
        witness,
        equality=eq_holds,
        ranges=ranges_hold,
    )


def verify_group_similarity(a, s, r, tol: Tolerance = DEFAULT_TOL) -> VerdictReport:
    """Group inverse of ``s^-1 a r`` through an inverse along an element.

    (i)  ``(s^-1 a r)^# = r^-1 a||(r s^-1 a r s^-1) s``.
    (ii) when ``a^#`` exists: ``(s^-1 a r)^# = r^-1 a^# s`` iff
         ``R a s r^-1 = R r s^-1 a`` and ``s r^-1 a R = a r s^-1 R``.
    """
    a, s, r = map(cmatrix, (a, s, r))
    s_inv, r_inv = invert(s, tol), invert(r, tol)
    x = s_inv @ a @ r
    direct = group_inverse(x, tol)
    if direct is None:
        raise PreconditionViolated("s^-1 a r is not group invertible")
    g = r @ s_inv @ a @ r @ s_inv
    prob = make_problem(a, g, tol=tol)
    rep = exists_along(prob)
    witness = {"a": a, "s": s, "r": r}
    if not rep.exists:
        return _verdict("thm28k", {"exists_along_g": (1.0, 0.0)}, witness)
    kappa = (cond(s) * cond(r)) ** 2 * max(1.0, rep.cond_v)
    checks = {"identity_i": (_rel(direct, r_inv @ inverse_along_block(prob).b @ s), tol.eq_tol * kappa)}
    details = {}
    a_sharp = group_inverse(a, tol)
    if a_sharp is not None:
        eq_holds = _rel(direct, r_inv @ a_sharp @ s) <= tol.eq_tol * kappa
        ranges_hold = row_range_equal(a @ s @ r_inv, r @ s_inv @ a, tol) and range_equal(
            s @ r_inv @ a, a @ r @ s_inv, tol
        )
        checks["biconditional_ii"] = (float(eq_holds != ranges_hold), 0.0)
        details = {"equality": eq_holds, "ranges": ranges_hold}
    return _verdict("thm28k", checks, witness, **details)


def verify_hermitian_products(a, d, tol: Tolerance = DEFAULT_TOL) -> VerdictReport:
    """With the Moore-Penrose inner inverse of ``d``:

    ``(a||d) a`` Hermitian iff ``(da)*`` lies in ``dR``;
    ``a (a||d)`` Hermitian iff ``ad`` lies in ``d*R``.
    """
    a, d = cmatrix(a), cmatrix(d)
    prob = make_problem(a, d, tol=tol)
    rep = exists_along(prob)
    if not rep.exists:
        raise PreconditionViolated("a is not invertible along d")
    b = inverse_along_block(prob).b
    kappa = max(1.0, rep.cond_v)

    def hermitian(m):
        return op_norm(m - adjoint(m)) <= tol.eq_tol * kappa * max(1.0, op_norm(m))

    ba, ab = b @ a, a @ b
    h1, m1 = hermitian(ba), in_range(adjoint(d @ a), d, tol)
    h2, m2 = hermitian(ab), in_range(a @ d, adjoint(d), tol)
    return _verdict(
        "t29",
        {"biconditional_i": (float(h1 != m1), 0.0), "biconditional_ii": (float(h2 != m2), 0.0)},
        {"a": a, "d": d, "b": b},
        ba_hermitian=h1,
        da_star_in_dR=m1,
        ab_hermitian=h2,
        ad_in_dstarR=m2,
    )


def perturbation_identity(a, d, b_mat, e, tol: Tolerance = DEFAULT_TOL, d_minus=None, e_minus=None) -> VerdictReport:
    """Exact difference formula between ``b||e`` and ``a||d``.

    ``b||e - a||d = b||e e^-(e-d)(1 - a a||d) + (1 - b||e b)(e-d) d^- a||d + b||e (a-b) a||d``
    for any inner inverses ``d^-`` and ``e^-`` (Moore-Penrose by default).
    """
    a, d, b_mat, e = map(cmatrix, (a, d, b_mat, e))
    p1 = make_problem(a, d, d_minus, tol)
    p2 = make_problem(b_mat, e, e_minus, tol)
    x = inverse_along_block(p1).b
    y = inverse_along_block(p2).b
    ident = np.eye(a.shape[0], dtype=np.complex128)
    lhs = y - x
    rhs = y @ p2.g @ (e - d) @ (ident - a @ x) + (ident - y @ b_mat) @ (e - d) @ p1.g @ x + y @ (a - b_mat) @ x
    kappa = max(exists_along(p1).cond_v, exists_along(p2).cond_v)
    return _verdict(
        "lemma-bound",
        {"identity": (op_norm(lhs - rhs), tol.eq_tol * (1.0 + kappa))},
        {"a": a, "d": d, "b": b_mat, "e": e},
        condition_estimate=kappa,
    )


def verify_cota(a, b, tol: Tolerance = DEFAULT_TOL) -> VerdictReport:
    """``||a^-1 - b^-1|| <= ||a^-1||^2 ||b-a|| / (1 - ||b-a|| ||a^-1||)``."""
    a, b = cmatrix(a), cmatrix(b)
    ai = invert(a, tol)
    na, gap = op_norm(ai), op_norm(b - a)
    if gap * na >= 1:
        raise PreconditionViolated("||b - a|| ||a^-1|| must be below 1")
    bound = na**2 * gap / (1.0 - gap * na)
    actual = op_norm(ai - invert(b, tol))
    return _verdict("cota", {"excess": (actual - bound, tol.eq_tol * max(1.0, bound))}, {"a": a, "b": b})


def verify_involution(a, d, tol: Tolerance = DEFAULT_TOL) -> VerdictReport:
    """``(a||d)* = (a*)||(d*)`` with existence on both sides."""
    a, d = cmatrix(a), cmatrix(d)
    p1 = make_problem(a, d, tol=tol)
    p2 = make_problem(adjoint(a), adjoint(d), tol=tol)
    r1, r2 = exists_along(p1), exists_along(p2)
    if r1.exists != r2.exists:
        return _verdict("remark1", {"existence": (1.0, 0.0)}, {"a": a, "d": d})
    if not r1.exists:
        return _verdict("remark1", {"existence": (0.0, 0.0)})
    lhs = adjoint(inverse_along_block(p1).b)
    rhs = inverse_along_block(p2).b
    return _verdict(
        "remark1", {"identity": (_rel(lhs, rhs), tol.eq_tol * max(r1.cond_v, r2.cond_v))}, {"a": a, "d": d}
    )


def _growth_exponent(values) -> float:
    """log2 of (max over the whole prefix) / (max over its first half)."""
    values = np.asarray(values, dtype=float)
    half = max(1, len(values) // 2)
    head = max(np.max(values[:half]), 1e-300)
    return float(math.log2(max(np.max(values), 1e-300) / head))


def continuity_experiment(a_seq, d_seq, a, d, tol: Tolerance = DEFAULT_TOL, growth_limit: float = 0.5) -> VerdictReport:
    """Finite-prefix check of continuity of ``(a_n, d_n) -> a_n||d_n``.

    A sequence counts as bounded when its running maximum grows by less than
    ``2**growth_limit`` from the first half of the prefix to the whole.  The
    envelope at step n is the norm bound obtained from the perturbation
    identity with the observed sup constants; the verdict is the implication
    "bounded and sup||d_n^-|| finite  =>  terminal error <= envelope".
    """
    a, d = cmatrix(a), cmatrix(d)
    base = make_problem(a, d, tol=tol)
    x = inverse_along_block(base).b
    ident = np.eye(a.shape[0], dtype=np.complex128)
    one_minus_ax = op_norm(ident - a @ x)
    nx, ng = op_norm(x), op_norm(base.g)
    norms, ginv, errors, envelope = [], [], [], []
    for an, dn in zip(a_seq, d_seq):
        prob = make_problem(an, dn, tol=tol)
        xn = inverse_along_block(prob).b
        norms.append(op_norm(xn))
        ginv.append(op_norm(prob.g))
        errors.append(op_norm(xn - x))
        big_m, big_g = max(norms), max(ginv)
        de, da_ = op_norm(prob.d - d), op_norm(prob.a - a)
        envelope.append(
            big_m * big_g * de * one_minus_ax + (1.0 + big_m * op_norm(prob.a)) * de * ng * nx + big_m * da_ * nx
        )
    bounded = _growth_exponent(norms) < growth_limit
    sup_finite = _growth_exponent(ginv) < growth_limit
    premise = bounded and sup_finite
    slack = tol.eq_tol * max(1.0, nx)
    violation = float(premise and errors[-1] > envelope[-1] + slack)
    return _verdict(
        "continuity",
        {"implication_ii": (violation, 0.0)},
        None,
        bounded=bounded,
        sup_dinv_finite=sup_finite,
        max_norm=max(norms),
        sup_dinv=max(ginv),
        terminal_error=errors[-1],
        terminal_envelope=envelope[-1],
        errors=errors,
        envelope=envelope,
        finite_prefix=True,
    )

"""Seeded verification suite: every verifier over a reproducible corpus.

Trial ``i`` of a run with base seed ``S`` draws from ``rng_for(S, tag, i)``
where ``tag`` identifies the theorem, so filtering the suite never changes
the instances another theorem sees.
"""

from __future__ import annotations

import math
import zlib
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import classical, theorems
from .corpus import (
    complex_gaussian,
    existence_instance,
    perturbation,
    random_invertible,
    random_rank,
    random_unitary,
    rng_for,
    with_singular_values,
)
from .errors import AlongInvError, NotInvertible
from .inner import random_inner_inverse
from .mary import exists_along, inverse_along_block, make_problem
from .numeric import DEFAULT_TOL, Tolerance, adjoint, invert, op_norm, pinv
from .theorems import VerdictReport, make_verdict
from .zn import ZnMatrix, ZnScalar, ZnSpace, zn_corner_table, zn_exists_along, zn_mary_inverse, zn_mary_table, zn_square_roots, zn_units

THEOREM_IDS = (
    "th28j",
    "th28j-unitary",
    "mp-similarity",
    "thm28k",
    "t29",
    "lemma-bound",
    "cota",
    "remark1",
    "weighted-mp",
    "continuity",
)
RINGS = ("z2", "z3", "z6")


def _tag(name: str) -> int:
    return zlib.crc32(name.encode())


def _rng(seed: int, name: str, trial: int) -> np.random.Generator:
    return rng_for(seed, _tag(name), trial)


def _trial_seed(seed: int, name: str, trial: int) -> int:
    """Integer seed recorded in verdicts; deterministic in (seed, name, trial)."""
    return int(_rng(seed, name, trial).integers(0, 2**31 - 1))


def _size(sizes: Sequence[int], trial: int) -> int:
    return sizes[trial % len(sizes)]


def _pair(seed: int, n: int, tol: Tolerance):
    return existence_instance(seed, n)


# -- complex verifiers --------------------------------------------------------


def _th28j(seed, n, tol, unitary=False):
    a, d = _pair(seed, n, tol)
    rng = rng_for(seed, 1)
    if unitary:
        u, v = random_unitary(rng, n), random_unitary(rng, n)
        # (u a v*) along (v d u*) is v (a||d) u*: s = u, r = v
        return theorems.verify_transform(a, d, u, v, tol, theorem_id="th28j-unitary")
    return theorems.verify_transform(a, d, random_invertible(rng, n), random_invertible(rng, n), tol)


def _mp_similarity(seed, n, tol):
    rng = rng_for(seed, 2)
    a = random_rank(rng, n, int(rng.integers(1, n + 1)))
    kind = seed % 3
    if kind == 0:
        s, r = random_unitary(rng, n), random_unitary(rng, n)
    elif kind == 1:
        s, r = random_invertible(rng, n), random_invertible(rng, n)
    else:
        s, r = np.eye(n), np.eye(n)
    return theorems.verify_mp_similarity(a, s, r, tol)


def _group_invertible(rng, n):
    """``X diag(J, 0) X^-1`` with ``J`` invertible: index at most one."""
    r = int(rng.integers(1, n + 1))
    core = np.zeros((n, n), dtype=np.complex128)
    core[:r, :r] = random_invertible(rng, r)
    x = random_invertible(rng, n)
    return x @ core @ invert(x)


def _thm28k(seed, n, tol):
    for attempt in range(20):
        rng = rng_for(seed, 3, attempt)
        a = _group_invertible(rng, n)
        if seed % 2 == 0:
            # polynomials in a commute with a, so condition (ii) holds
            c = rng.uniform(0.5, 1.5, 2)
            s = c[0] * np.eye(n) + c[1] * a
            s = s if op_norm(s) * op_norm(invert(s)) < 1e3 else np.eye(n)
            r = s
        else:
            s, r = random_invertible(rng, n), random_invertible(rng, n)
        try:
            return theorems.verify_group_similarity(a, s, r, tol)
        except (AlongInvError, NotInvertible):
            continue
    raise RuntimeError(f"no group-invertible similarity fixture for seed {seed}")


def _t29(seed, n, tol):
    rng = rng_for(seed, 4)
    kind = seed % 3
    if kind == 0:
        a = random_invertible(rng, n)
        d = adjoint(a)
    elif kind == 1:
        h = with_singular_values(rng, n, rng.uniform(0.5, 2.0, int(rng.integers(1, n + 1))))
        a = h + adjoint(h)
        d = a
        if not exists_along(make_problem(a, d, tol=tol)).exists:
            a, d = existence_instance(seed, n)
    else:
        a, d = existence_instance(seed, n)
    return theorems.verify_hermitian_products(a, d, tol)


def _lemma_bound(seed, n, tol):
    a, d = existence_instance(seed, n)
    scale = 10.0 ** -(1 + seed % 8)
    for attempt in range(20):
        rng = rng_for(seed, 5, attempt)
        b = a + perturbation(rng, n, scale)
        ident = np.eye(n)
        if seed % 4 == 1:
            # same rank: e = (1 + E1) d (1 + E2)
            e = (ident + perturbation(rng, n, scale)) @ d @ (ident + perturbation(rng, n, scale))
        elif seed % 4 == 3:
            # the lemma has no rank hypothesis: add a unit-size rank-one piece
            e = d + np.outer(complex_gaussian(rng, n), complex_gaussian(rng, n)) / n
        else:
            e = d
        if exists_along(make_problem(b, e, tol=tol)).exists:
            break
    else:  # pragma: no cover - small perturbations keep existence
        raise RuntimeError("perturbed pair lost existence")
    d_minus = e_minus = None
    if seed % 3 == 2:
        d_minus = random_inner_inverse(d, seed, tol)
        e_minus = random_inner_inverse(e, seed + 1, tol)
    return theorems.perturbation_identity(a, d, b, e, tol, d_minus, e_minus)


def _cota(seed, n, tol):
    rng = rng_for(seed, 6)
    a = random_invertible(rng, n)
    frac = rng.uniform(0.05, 0.95)
    e = perturbation(rng, n, frac / op_norm(invert(a, tol)))
    return theorems.verify_cota(a, a + e, tol)


def _remark1(seed, n, tol):
    a, d = existence_instance(seed, n)
    return theorems.verify_involution(a, d, tol)


def random_weights(rng, n: int, spread: float = 4.0) -> classical.WeightPair:
    def pd():
        u = random_unitary(rng, n)
        return (u * rng.uniform(1.0, spread, n)) @ adjoint(u)

    m, w = pd(), pd()
    return classical.make_weights(0.5 * (m + adjoint(m)), 0.5 * (w + adjoint(w)))


def weighted_mp_verdict(a, w: classical.WeightPair, z, tol: Tolerance = DEFAULT_TOL) -> VerdictReport:
    """Weighted Moore-Penrose by three routes plus the four defining residuals."""
    x = classical.weighted_mp(a, w, tol)
    uv = classical.weighted_mp_via_uv(a, w, z, tol)
    res = classical.weighted_mp_residuals(a, x, w)
    scale = max(1.0, op_norm(x))
    checks = {k: (v, 1e-8) for k, v in res.items()}
    checks["uv_equivalence"] = (float(uv.u_invertible != uv.v_invertible), 0.0)
    for name, other in (("agree_u", uv.x_from_u), ("agree_v", uv.x_from_v)):
        gap = math.inf if other is None else op_norm(other - x) / scale
        checks[name] = (gap, 1e-6)
    return make_verdict("weighted-mp", checks, {"a": a, "m": w.m, "n": w.n, "z": z})


def _weighted_mp(seed, n, tol):
    rng = rng_for(seed, 7)
    a = random_rank(rng, n, int(rng.integers(1, n + 1)))
    w = random_weights(rng, n)
    z = random_inner_inverse(adjoint(a), seed, tol).g
    return weighted_mp_verdict(a, w, z, tol)


def continuity_verdicts(seed: int, n: int, tol: Tolerance = DEFAULT_TOL, steps: int = 64, rank_drop: bool = True):
    """Linear-decay envelope for ``a + E/k`` and the rank-drop counterexample."""
    a, d = existence_instance(seed, n)
    rng = rng_for(seed, 8)
    e = perturbation(rng, n, 0.1 / max(1.0, op_norm(inverse_along_block(make_problem(a, d, tol=tol)).b)))
    a_seq = [a + e / k for k in range(1, steps + 1)]
    rep = theorems.continuity_experiment(a_seq, [d] * steps, a, d, tol)
    errs = rep.details["errors"]
    floor = 1e-13 * max(1.0, rep.details["max_norm"])
    decay = errs[63] - (10.0 * errs[7] / 8.0 + floor)
    first = make_verdict(
        "continuity",
        {
            "implication_ii": (rep.residuals["implication_ii"], 0.0),
            "linear_decay_excess": (decay, 0.0),
            "premise_bounded": (float(not rep.details["bounded"]), 0.0),
        },
        None,
        **rep.details,
    )
    if not rank_drop:
        return [first]
    # d_k = diag(1, 1/k) -> diag(1, 0) with a = 1.  Each d_k is invertible, so
    # a||d_k = 1 stays bounded while the inner inverses d_k^-1 = diag(1, k) do
    # not; the inverses miss a||d = diag(1, 0) by a fixed amount.
    ident = np.eye(2)
    ds = [np.diag([1.0, 1.0 / k]) for k in range(1, steps + 1)]
    drop = theorems.continuity_experiment([ident] * steps, ds, ident, np.diag([1.0, 0.0]), tol)
    second = make_verdict(
        "continuity",
        {
            "reported_unbounded": (float(drop.details["sup_dinv_finite"]), 0.0),
            "no_convergence": (float(drop.details["terminal_error"] < 0.5), 0.0),
            "implication_ii": (drop.residuals["implication_ii"], 0.0),
        },
        None,
        case="rank-drop",
        **drop.details,
    )
    return [first, second]


_COMPLEX = {
    "th28j": lambda s, n, t: _th28j(s, n, t),
    "th28j-unitary": lambda s, n, t: _th28j(s, n, t, unitary=True),
    "mp-similarity": _mp_similarity,
    "thm28k": _thm28k,
    "t29": _t29,
    "lemma-bound": _lemma_bound,
    "cota": _cota,
    "remark1": _remark1,
    "weighted-mp": _weighted_mp,
}


# -- exact ring ---------------------------------------------------------------


def _ring_verdict(theorem_id, mismatches, **details) -> VerdictReport:
    return make_verdict(theorem_id, {"mismatches": (float(mismatches), 0.0)}, None, **details)


def ring_exhaustive(modulus: int, k: int = 2) -> VerdictReport:
    """Brute-force inverse along d against the exact corner test, every pair of ``M_k(Z_n)``."""
    brute, corner = zn_mary_table(k, modulus), zn_corner_table(k, modulus)
    bad = int(np.count_nonzero(brute != corner))
    return _ring_verdict(
        f"ring-exhaustive-z{modulus}", bad, pairs=int(brute.size), existing=int(np.count_nonzero(brute >= 0))
    )


def ring_transform(modulus: int, k: int = 2) -> VerdictReport:
    """``(s a r^-1)||(r d s^-1) = r (a||d) s^-1`` for all pairs and all invertible s, r."""
    table = zn_mary_table(k, modulus)
    space = ZnSpace(k, k, modulus)
    elems = space.elements
    weights = np.int64(modulus) ** np.arange(k * k - 1, -1, -1, dtype=np.int64)

    def codes(left, right):
        prod = np.einsum("ij,njk,kl->nil", left, elems, right) % modulus
        return prod.reshape(space.count, -1) @ weights

    units = [(m.data, inv.data) for m, inv in zn_units(k, modulus)]
    bad = 0
    for s, s_inv in units:
        for r, r_inv in units:
            a_map, d_map, b_map = codes(s, r_inv), codes(r, s_inv), codes(r, s_inv)
            moved = table[np.ix_(a_map, d_map)]
            expected = np.where(table >= 0, b_map[np.maximum(table, 0)], -1)
            bad += int(np.count_nonzero(moved != expected))
    return _ring_verdict(f"ring-th28j-z{modulus}", bad, units=len(units))


def ring_transpose(modulus: int, k: int = 2) -> VerdictReport:
    """``(a^T)||(d^T) = (a||d)^T`` over every pair (identity involution)."""
    table = zn_mary_table(k, modulus)
    space = ZnSpace(k, k, modulus)
    weights = np.int64(modulus) ** np.arange(k * k - 1, -1, -1, dtype=np.int64)
    tcode = np.transpose(space.elements, (0, 2, 1)).reshape(space.count, -1) @ weights
    moved = table[np.ix_(tcode, tcode)]
    expected = np.where(table >= 0, tcode[np.maximum(table, 0)], -1)
    return _ring_verdict(f"ring-transpose-z{modulus}", int(np.count_nonzero(moved != expected)))


def z6_square_roots() -> VerdictReport:
    """The square roots of [4] in Z_6 are exactly [2] and [4]."""
    roots = sorted(y.value for y in zn_square_roots(ZnScalar(4, 6)))
    return make_verdict(
        "z6-square-roots", {"mismatch": (float(roots != [2, 4]), 0.0)}, None, roots=roots
    )


def z6_sampled(seed: int, trials: int) -> VerdictReport:
    """1x1 pairs exhaustively and seeded 2x2 pairs over Z_6 (not a field)."""
    bad = 0
    for a in range(6):
        for d in range(6):
            am, dm = ZnMatrix([[a]], 6), ZnMatrix([[d]], 6)
            brute = zn_mary_inverse(am, dm)
            rep = zn_exists_along(am, dm)
            bad += int((brute is None) != (not rep.exists) or (brute is not None and brute != rep.b))
    space = ZnSpace(2, 2, 6)
    rng = _rng(seed, "z6", 0)
    for _ in range(trials):
        am = space.matrix(int(rng.integers(space.count)))
        dm = space.matrix(int(rng.integers(space.count)))
        brute = zn_mary_inverse(am, dm, space=space)
        rep = zn_exists_along(am, dm)
        bad += int((brute is None) != (not rep.exists) or (brute is not None and brute != rep.b))
    return _ring_verdict("ring-sampled-z6", bad, pairs=36 + trials)


def ring_verdicts(ring: str, seed: int = 0, trials: int = 100) -> list:
    if ring == "z2":
        return [ring_exhaustive(2), ring_transform(2), ring_transpose(2)]
    if ring == "z3":
        return [ring_exhaustive(3), ring_transform(3), ring_transpose(3)]
    if ring == "z6":
        return [z6_square_roots(), z6_sampled(seed, min(trials, 100))]
    raise ValueError(f"unknown ring {ring!r}; choose from {', '.join(RINGS)}")


# -- driver ---------------------------------------------------------------------


def run_suite(
    seed: int = 42,
    sizes: Sequence[int] = tuple(range(2, 7)),
    trials: int = 100,
    theorem_ids: Optional[Iterable[str]] = None,
    rings: Optional[Iterable[str]] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> Iterator[VerdictReport]:
    """Yield verdicts in a fixed order: theorems as listed, then rings.

    With neither filter (both None) everything runs; otherwise only what is
    listed runs.
    """
    if theorem_ids is None and rings is None:
        ids, ring_list = list(THEOREM_IDS), list(RINGS)
    else:
        ids, ring_list = list(theorem_ids or ()), list(rings or ())
    for tid in ids:
        if tid not in THEOREM_IDS:
            raise ValueError(f"unknown theorem id {tid!r}")
    for tid in ids:
        for i in range(trials):
            tseed = _trial_seed(seed, tid, i)
            n = _size(sizes, i)
            if tid == "continuity":
                reports = continuity_verdicts(tseed, n, tol, rank_drop=i == 0)
            else:
                reports = [_COMPLEX[tid](tseed, n, tol)]
            for rep in reports:
                rep.seed = tseed
                yield rep
    for ring in ring_list:
        for rep in ring_verdicts(ring, seed, trials):
            rep.seed = seed
            yield rep

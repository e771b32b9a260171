"""Seeded random instances for property checks and the verification suite."""

from __future__ import annotations

import numpy as np

from .inner import random_unit_disc
from .mary import exists_along, make_problem
from .numeric import adjoint, op_norm


def rng_for(seed: int, *salt: int) -> np.random.Generator:
    return np.random.default_rng([seed, *salt])


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary from a Householder QR with the phase of ``diag(R)`` removed."""
    q, r = np.linalg.qr(complex_gaussian(rng, (n, n)))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def with_singular_values(rng, n: int, sv) -> np.ndarray:
    """``U diag(sv) V*`` for Haar ``U, V``; ``sv`` shorter than n pads with zeros."""
    sv = np.concatenate([np.asarray(sv, dtype=float), np.zeros(n - len(sv))])
    return (random_unitary(rng, n) * sv) @ adjoint(random_unitary(rng, n))


def random_invertible(rng, n: int, lo: float = 0.5, hi: float = 2.0) -> np.ndarray:
    return with_singular_values(rng, n, rng.uniform(lo, hi, n))


def random_rank(rng, n: int, r: int, lo: float = 0.5, hi: float = 2.0) -> np.ndarray:
    return with_singular_values(rng, n, rng.uniform(lo, hi, r))


def positive_pair(rng, n: int, r: int, jitter: float = 0.0):
    """``(a, d)`` with ``a`` invertible and ``da`` Hermitian positive semidefinite on range(d).

    ``a = d* + V_perp U_perp*`` from the SVD ``d = U S V*``; with ``jitter``
    a small random perturbation is added (``a`` stays invertible for
    small jitter).
    """
    u, v = random_unitary(rng, n), random_unitary(rng, n)
    s = rng.uniform(0.5, 2.0, r)
    d = (u[:, :r] * s) @ adjoint(v[:, :r])
    a = adjoint(d) + v[:, r:] @ adjoint(u[:, r:])
    if jitter:
        a = a + jitter * complex_gaussian(rng, (n, n)) / np.sqrt(n)
    return a, d


def existence_instance(seed: int, n: int, r=None, family: str = "generic", max_cond: float = 1e3, tries: int = 50):
    """Draw ``(a, d)`` with ``a`` invertible, ``rank d = r`` and a well conditioned corner.

    Families: ``generic`` (independent Haar factors), ``positive`` (exact
    positive ``da``), ``near-positive`` (positive plus 5% jitter).  Draws whose
    corner matrix has condition above ``max_cond`` are rejected.
    """
    for attempt in range(tries):
        rng = rng_for(seed, n, attempt)
        rank_ = r if r is not None else int(rng.integers(1, n + 1))
        if family == "generic":
            a = random_invertible(rng, n)
            d = random_rank(rng, n, rank_)
        elif family == "positive":
            a, d = positive_pair(rng, n, rank_)
        elif family == "near-positive":
            a, d = positive_pair(rng, n, rank_, jitter=0.05)
        else:
            raise ValueError(f"unknown family {family!r}")
        rep = exists_along(make_problem(a, d))
        if rep.exists and rep.cond_v <= max_cond:
            return a, d
    raise RuntimeError(f"no well-conditioned instance after {tries} tries (seed={seed}, n={n})")


def outside_range_rhs(rng, d: np.ndarray, p: np.ndarray, cols: int = None) -> np.ndarray:
    """A right-hand side with a unit-size component outside the column space of ``d``."""
    n = d.shape[0]
    cols = cols or n
    inside = d @ complex_gaussian(rng, (n, cols))
    outside = (np.eye(n) - p) @ complex_gaussian(rng, (n, cols))
    outside = outside / max(op_norm(outside), 1e-300)
    return inside + outside


def perturbation(rng, n: int, scale: float) -> np.ndarray:
    e = random_unit_disc(rng, (n, n))
    return scale * e / op_norm(e)

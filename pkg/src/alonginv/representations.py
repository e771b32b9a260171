"""Analytic representations of the inverse along ``d``: limits, series, integrals.

Each route is checked against the block formula of :mod:`alonginv.mary`;
histories record the distance to that reference at every step.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    ContractionFailed,
    InputError,
    MaxTermsExceeded,
    NotInvertible,
    NotInvertibleAlong,
    PreconditionViolated,
    QuadratureNotConverged,
    SingularResolvent,
    SpectrumViolation,
)
from .mary import MaryProblem, Method, exists_along, inverse_along_block, make_result
from .numeric import expm, op_norm, solve, spectrum
from .spaces import in_range, in_row_range

_EPS = float(np.finfo(float).eps)
DEFAULT_T_VALUES = tuple(10.0**-k for k in range(1, 9))


@dataclass(frozen=True)
class LimitSchedule:
    t_values: tuple = DEFAULT_T_VALUES
    extrapolate: bool = True

    def __post_init__(self):
        ts = tuple(float(t) for t in self.t_values)
        if not ts:
            raise InputError("schedule needs at least one t")
        if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
            raise InputError("t_values must be positive and strictly decreasing")
        object.__setattr__(self, "t_values", ts)


@dataclass(frozen=True)
class SeriesParams:
    beta: float
    max_terms: int = 100_000
    conv_tol: float = 1e-12

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta == 0:
            raise InputError("beta must be a nonzero real number")


@dataclass(frozen=True)
class QuadParams:
    """Composite Gauss-Legendre settings.

    ``horizon=None`` picks the truncation point from the spectral abscissa.
    ``panels`` is the initial number of sub-panels per geometric segment; it
    is doubled up to ``max_doublings`` times.
    """

    horizon: Optional[float] = None
    panels: int = 1
    nodes_per_panel: int = 10
    max_doublings: int = 6
    safety: float = 1.2

    def __post_init__(self):
        if self.horizon is not None and not self.horizon > 0:
            raise InputError("horizon must be positive")
        if self.panels < 1 or self.nodes_per_panel < 1:
            raise InputError("panels and nodes_per_panel must be at least 1")


def _require_existence(prob: MaryProblem):
    rep = exists_along(prob)
    if not rep.exists:
        raise NotInvertibleAlong(f"a is not invertible along d (cond(v) = {rep.cond_v:.3e})")
    return rep


# -- limits -----------------------------------------------------------------


def limit_error_bound(prob: MaryProblem, t: float, mirror: bool = False) -> float:
    """Upper bound on ``||(da + t)^-1 d - a||d||`` (or the mirrored ``d(ad + t)^-1``).

    Needs ``d g`` Hermitian (``g d`` for the mirror) and
    ``t ||a||d|| ||g|| < 1``.
    """
    if not t > 0:
        raise PreconditionViolated("t must be positive")
    hermitian = prob.dinv.d_minus_d_hermitian if mirror else prob.dinv.dd_minus_hermitian
    if not hermitian:
        raise PreconditionViolated("bound needs an inner inverse with Hermitian product")
    b = inverse_along_block(prob).b
    nb, ng = op_norm(b), op_norm(prob.g)
    k = t * nb * ng
    if k >= 1:
        raise PreconditionViolated(f"t*||b||*||g|| = {k:.3g} >= 1")
    return t * nb**2 * ng**2 / (1.0 - k) * op_norm(prob.d)


def _extrapolate(values, scale):
    """Neville-Richardson tableau towards ``t = 0``.

    The resolvent is analytic at ``t = 0``, so each column removes one more
    power of ``t``.  Each entry is scored by its change from the left
    neighbour plus the rounding ``eps * scale / t`` of the solve at its
    smallest shift (that rounding is smooth in ``t`` and cancels in the
    differences, so it has to be added by hand).  The best score wins.
    Returns ``(value, info)``.
    """
    ts = [t for t, _ in values]
    prev = [x for _, x in values]
    best = (math.inf, prev[-1], ts[-1], 0)
    for j in range(1, len(values)):
        cur = []
        for k in range(j, len(values)):
            lo, hi = ts[k - j], ts[k]
            x = (lo * prev[k - j + 1] - hi * prev[k - j]) / (lo - hi)
            est = op_norm(x - prev[k - j + 1]) / max(1.0, op_norm(x)) + _EPS * scale / hi
            if est < best[0]:
                best = (est, x, hi, j)
            cur.append(x)
        prev = cur
    est, x, t, order = best
    return x, {"t": t, "order": order, "estimate": est}


def _limit(prob: MaryProblem, sched: LimitSchedule, mirror: bool):
    reference = inverse_along_block(prob).b
    ref_norm = max(1.0, op_norm(reference))
    ident = np.eye(prob.n, dtype=np.complex128)
    core = prob.a @ prob.d if mirror else prob.d @ prob.a
    history, values = [], []
    for t in sched.t_values:
        try:
            x = solve(core + t * ident, prob.d, prob.tol, right=mirror)
        except NotInvertible:
            continue
        try:
            bound = limit_error_bound(prob, t, mirror)
        except PreconditionViolated:
            bound = math.nan
        values.append((t, x))
        history.append({"t": t, "error_vs_block": op_norm(x - reference) / ref_norm, "bound": bound})
    if not values:
        raise SingularResolvent("resolvent singular at every scheduled t")
    b, info = values[-1][1], None
    if sched.extrapolate and len(values) >= 2:
        b, info = _extrapolate(values, op_norm(core))
    method = Method.LIMIT_MIRROR if mirror else Method.LIMIT
    return make_result(prob, b, method, history=history, extrapolated=bool(sched.extrapolate), extrapolation=info)


def inverse_along_limit(prob: MaryProblem, sched: LimitSchedule = LimitSchedule()):
    """``lim_{t->0} (da + t)^-1 d`` evaluated along a decreasing schedule."""
    _require_existence(prob)
    return _limit(prob, sched, mirror=False)


def inverse_along_limit_mirror(prob: MaryProblem, sched: LimitSchedule = LimitSchedule()):
    """``lim_{t->0} d (ad + t)^-1``."""
    _require_existence(prob)
    return _limit(prob, sched, mirror=True)


@dataclass(frozen=True)
class RhsLimit:
    converges: bool
    value: Optional[np.ndarray]
    growth: float
    divergence_detected: bool
    history: tuple = field(default=())


def _limit_with(prob, f, sched, left: bool):
    _require_existence(prob)
    f = np.asarray(f, dtype=np.complex128)
    ident = np.eye(prob.n, dtype=np.complex128)
    norms, values = [], []
    for t in sched.t_values:
        try:
            if left:
                x = solve(prob.a @ prob.d + t * ident, f, prob.tol, right=True)
            else:
                x = solve(prob.d @ prob.a + t * ident, f, prob.tol)
        except NotInvertible:
            continue
        values.append((t, x))
        norms.append({"t": t, "norm": op_norm(x)})
    if not values:
        raise SingularResolvent("resolvent singular at every scheduled t")
    if len(norms) >= 2 and norms[-2]["norm"] > 0:
        growth = norms[-1]["norm"] / norms[-2]["norm"]
    else:
        growth = 1.0
    member = in_row_range(f, prob.d, prob.tol) if left else in_range(f, prob.d, prob.tol)
    value = None
    if member:
        value = values[-1][1]
        if sched.extrapolate and len(values) >= 2:
            value, _ = _extrapolate(values, op_norm(prob.d @ prob.a))
    return RhsLimit(member, value, growth, growth >= 5.0, tuple(norms))


def limit_with_rhs(prob: MaryProblem, f, sched: LimitSchedule = LimitSchedule()) -> RhsLimit:
    """Probe ``lim_{t->0} (da + t)^-1 f``.

    Converges iff ``f`` lies in the column space of ``d``; the limit is then
    ``a||d g f`` for any inner inverse ``g``.  Otherwise the ``(1-p) f``
    component grows like ``1/t``, reported as ``growth`` between the last two
    schedule points (``divergence_detected`` when at least 5x).
    """
    return _limit_with(prob, f, sched, left=False)


def limit_with_lhs(prob: MaryProblem, f, sched: LimitSchedule = LimitSchedule()) -> RhsLimit:
    """Mirror of :func:`limit_with_rhs` for ``f (ad + t)^-1`` and row spaces."""
    return _limit_with(prob, f, sched, left=True)


# -- Neumann series -----------------------------------------------------------


def contraction_factor(prob: MaryProblem, beta: float) -> float:
    """``||p - beta dap||``."""
    p = prob.p
    return op_norm(p - beta * (prob.d @ prob.a @ p))


def auto_beta(prob: MaryProblem):
    """``beta = +-1/||dap||``, whichever contracts; returns ``(beta, q)``."""
    dap = prob.d @ prob.a @ prob.p
    scale = op_norm(dap)
    if scale == 0:
        raise ContractionFailed("dap = 0, no contracting beta")
    best = None
    for beta in (1.0 / scale, -1.0 / scale):
        q = contraction_factor(prob, beta)
        if q < 1 and (best is None or q < best[1]):
            best = (beta, q)
    if best is None:
        raise ContractionFailed("||p - beta dap|| >= 1 for beta = +-1/||dap||")
    return best


def series_partial_sums(prob: MaryProblem, beta: float, mirror: bool = False):
    """Yield ``(n, S_n, ||term_n||)`` where ``S_n`` sums the first ``n + 1`` terms.

    Left form: ``beta (1 - beta da)^k d``; mirror: ``beta d (1 - beta ad)^k``.
    """
    ident = np.eye(prob.n, dtype=np.complex128)
    if mirror:
        step = ident - beta * (prob.a @ prob.d)
    else:
        step = ident - beta * (prob.d @ prob.a)
    term = beta * prob.d
    total = term.copy()
    n = 0
    while True:
        yield n, total, op_norm(term)
        term = term @ step if mirror else step @ term
        total = total + term
        n += 1


def _sum_series(prob, params: SeriesParams, mirror: bool):
    history = []
    for n, total, tnorm in series_partial_sums(prob, params.beta, mirror):
        if n % 16 == 0 or tnorm < params.conv_tol * max(1.0, op_norm(total)):
            history.append({"n": n, "term_norm": tnorm})
        if tnorm < params.conv_tol * max(1.0, op_norm(total)):
            return total, history
        if n + 1 >= params.max_terms:
            raise MaxTermsExceeded(f"series not converged after {params.max_terms} terms")


def inverse_along_series(prob: MaryProblem, params: SeriesParams) -> "MaryResult":
    """``beta sum_n (1 - beta da)^n d`` under ``||p - beta dap|| < 1``.

    The right-handed form ``beta sum_n d (1 - beta ad)^n`` is summed too and
    the gap between the two is stored in ``extra['form_gap']``.
    """
    q = contraction_factor(prob, params.beta)
    if q >= 1:
        raise ContractionFailed(f"||p - beta dap|| = {q:.6g} >= 1")
    left, history = _sum_series(prob, params, mirror=False)
    right, _ = _sum_series(prob, params, mirror=True)
    gap = op_norm(left - right) / max(1.0, op_norm(left))
    return make_result(prob, left, Method.SERIES, history=history, beta=params.beta, q=q, form_gap=gap)


# -- integral -------------------------------------------------------------------


def _nonzero_spectrum(m, prob: MaryProblem):
    eig = spectrum(m)
    cut = math.sqrt(prob.tol.rank_tol) * max(1.0, op_norm(m))
    return eig[np.abs(eig) > cut]


def _panel_edges(fast: float, horizon: float, per_segment: int):
    edges = [0.0]
    right = min(fast, horizon)
    while True:
        left = edges[-1]
        edges.extend(np.linspace(left, right, per_segment + 1)[1:].tolist())
        if right >= horizon:
            return np.array(edges)
        right = min(2.0 * right, horizon)


def _integrate(prob: MaryProblem, params: QuadParams, mirror: bool):
    core = prob.a @ prob.d if mirror else prob.d @ prob.a
    nz = _nonzero_spectrum(core, prob)
    if nz.size and np.min(nz.real) <= prob.tol.rank_tol:
        raise SpectrumViolation(
            f"nonzero spectrum of {'ad' if mirror else 'da'} leaves the open right half plane "
            f"(min Re = {np.min(nz.real):.3e})"
        )
    d = prob.d
    if nz.size == 0 or not np.any(d):
        # then d = 0 and the integrand vanishes identically
        return np.zeros_like(d), [], 0.0, 0.0
    abscissa = float(np.min(nz.real))
    conv_tol = prob.tol.conv_tol
    horizon = params.horizon or params.safety * math.log(1.0 / conv_tol) / abscissa
    fast = 1.0 / max(op_norm(core), abscissa)
    nodes, weights = leggauss(params.nodes_per_panel)

    def integrand(t):
        e = expm(-t * core)
        return d @ e if mirror else e @ d

    def quad(per_segment):
        edges = _panel_edges(fast, horizon, per_segment)
        total = np.zeros_like(d)
        for lo, hi in zip(edges[:-1], edges[1:]):
            half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
            for x, wt in zip(nodes, weights):
                total = total + (wt * half) * integrand(mid + half * x)
        return total

    history = []
    per_segment = params.panels
    previous = quad(per_segment)
    for _ in range(params.max_doublings):
        per_segment *= 2
        current = quad(per_segment)
        change = op_norm(current - previous) / max(1.0, op_norm(current))
        history.append({"panels_per_segment": per_segment, "change": change})
        previous = current
        if change < conv_tol:
            break
    else:
        raise QuadratureNotConverged(
            f"Gauss-Legendre change {history[-1]['change']:.3e} above {conv_tol:.1e} after "
            f"{params.max_doublings} doublings"
        )
    # tail beyond the horizon equals exp(-T core) applied to the full integral
    e_tail = expm(-horizon * core)
    tail = op_norm(previous @ e_tail if mirror else e_tail @ previous)
    return previous, history, horizon, tail


def inverse_along_integral(prob: MaryProblem, params: QuadParams = QuadParams()):
    """``int_0^inf exp(-t da) d dt``; needs the nonzero spectrum of ``da`` in Re > 0."""
    _require_existence(prob)
    b, history, horizon, tail = _integrate(prob, params, mirror=False)
    return make_result(prob, b, Method.INTEGRAL, history=history, horizon=horizon, tail=tail)


def inverse_along_integral_mirror(prob: MaryProblem, params: QuadParams = QuadParams()):
    """``int_0^inf d exp(-t ad) dt``; needs the nonzero spectrum of ``ad`` in Re > 0."""
    _require_existence(prob)
    b, history, horizon, tail = _integrate(prob, params, mirror=True)
    return make_result(prob, b, Method.INTEGRAL_MIRROR, history=history, horizon=horizon, tail=tail)


def write_history_csv(history, path) -> None:
    """Limit-route history as CSV with columns ``t, error_vs_block, bound``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "error_vs_block", "bound"])
        for row in history:
            writer.writerow([repr(float(row["t"])), repr(float(row["error_vs_block"])), repr(float(row["bound"]))])

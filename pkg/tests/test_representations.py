import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from alonginv.corpus import existence_instance, outside_range_rhs, rng_for
from alonginv.errors import (
    ContractionFailed,
    InputError,
    MaxTermsExceeded,
    NotInvertibleAlong,
    PreconditionViolated,
    QuadratureNotConverged,
    SpectrumViolation,
)
from alonginv.inner import random_inner_inverse
from alonginv.mary import definition_check, exists_along, inverse_along_block, make_problem
from alonginv.numeric import op_norm
from alonginv.representations import (
    LimitSchedule,
    QuadParams,
    SeriesParams,
    auto_beta,
    contraction_factor,
    inverse_along_integral,
    inverse_along_integral_mirror,
    inverse_along_limit,
    inverse_along_limit_mirror,
    inverse_along_series,
    limit_error_bound,
    limit_with_lhs,
    limit_with_rhs,
    series_partial_sums,
    write_history_csv,
)

from conftest import A1, D1, P1, SWAP, close

seeds = st.integers(0, 10_000)
sizes = st.integers(2, 8)


class TestSchedules:
    def test_default(self):
        s = LimitSchedule()
        assert s.t_values == tuple(10.0**-k for k in range(1, 9)) and s.extrapolate

    @pytest.mark.parametrize("ts", [(), (0.1, 0.1), (0.1, 0.2), (1.0, -1.0)])
    def test_invalid(self, ts):
        with pytest.raises(InputError):
            LimitSchedule(ts)

    def test_series_beta_nonzero(self):
        with pytest.raises(InputError):
            SeriesParams(0.0)

    def test_quad_params(self):
        with pytest.raises(InputError):
            QuadParams(horizon=-1.0)
        with pytest.raises(InputError):
            QuadParams(panels=0)


class TestLimit:
    def test_a1_d1_closed_form(self):
        prob = make_problem(A1, D1)
        res = inverse_along_limit(prob, LimitSchedule(extrapolate=False))
        for row in res.history:
            t = row["t"]
            # (da + t)^-1 d = diag(1/(1+t), 0)
            assert row["error_vs_block"] == pytest.approx(t / (1 + t), rel=1e-9)
        assert close(res.b, D1, 1e-7)

    @pytest.mark.parametrize("route", [inverse_along_limit, inverse_along_limit_mirror])
    def test_examples(self, route):
        assert close(route(make_problem(np.eye(2), np.eye(2))).b, np.eye(2), 1e-10)
        assert close(route(make_problem(A1, D1)).b, D1, 1e-10)
        # group case: (a^2 + t)^-1 a -> a^# = a for idempotent a
        assert close(route(make_problem(P1, P1)).b, P1, 1e-10)

    def test_nonexistence(self):
        with pytest.raises(NotInvertibleAlong):
            inverse_along_limit(make_problem(SWAP, D1))

    @given(seeds, sizes)
    def test_agrees_with_block(self, seed, n):
        a, d = existence_instance(seed, n)
        prob = make_problem(a, d)
        ref = inverse_along_block(prob)
        for route in (inverse_along_limit, inverse_along_limit_mirror):
            assert close(route(prob).b, ref.b, 1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_tableau_beats_smallest_shift(self, seed):
        # the raw t = 1e-8 value carries ~eps/t rounding; the tableau stops earlier
        a, d = existence_instance(seed, 5)
        prob = make_problem(a, d)
        ref = inverse_along_block(prob).b
        res = inverse_along_limit(prob)
        raw = inverse_along_limit(prob, LimitSchedule(extrapolate=False)).b
        info = res.extra["extrapolation"]
        assert info["t"] > 1e-8 and info["order"] >= 2
        assert op_norm(res.b - ref) < op_norm(raw - ref)
        assert definition_check(a, d, res.b)

    @pytest.mark.parametrize("seed", range(10))
    def test_linear_convergence(self, seed):
        a, d = existence_instance(seed, 4, max_cond=20)
        hist = inverse_along_limit(make_problem(a, d), LimitSchedule(extrapolate=False)).history
        errs = [h["error_vs_block"] for h in hist[:5]]
        ratios = [e0 / e1 for e0, e1 in zip(errs, errs[1:])]
        assert all(6.0 < r < 14.0 for r in ratios[1:])


class TestBound:
    def test_a1_d1(self):
        prob = make_problem(A1, D1)
        for t in (1e-2, 1e-3, 0.3):
            assert limit_error_bound(prob, t) == pytest.approx(t / (1 - t), rel=1e-12)

    def test_identity(self):
        assert limit_error_bound(make_problem(np.eye(2), np.eye(2)), 0.1) == pytest.approx(0.1 / 0.9)

    def test_too_large_t(self):
        with pytest.raises(PreconditionViolated):
            limit_error_bound(make_problem(A1, D1), 1.0)

    def test_needs_hermitian_product(self):
        d = existence_instance(1, 4)[1]
        a = existence_instance(1, 4)[0]
        prob = make_problem(a, d, random_inner_inverse(d, 3))
        with pytest.raises(PreconditionViolated):
            limit_error_bound(prob, 1e-6)

    @pytest.mark.parametrize("seed", range(100))
    def test_bound_holds(self, seed):
        a, d = existence_instance(seed, 2 + seed % 7)
        prob = make_problem(a, d)
        t = 1e-3
        try:
            bound = limit_error_bound(prob, t)
        except PreconditionViolated:
            pytest.skip("t above the bound's range for this instance")
        b = inverse_along_block(prob).b
        actual = op_norm(np.linalg.solve(d @ a + t * np.eye(len(a)), d) - b)
        assert actual <= bound + 1e-8

    def test_csv(self, tmp_path):
        res = inverse_along_limit(make_problem(A1, D1))
        path = tmp_path / "h.csv"
        write_history_csv(res.history, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,error_vs_block,bound" and len(lines) == 9


class TestRhs:
    def test_f_equals_d(self):
        a, d = existence_instance(4, 4)
        prob = make_problem(a, d)
        out = limit_with_rhs(prob, d)
        assert out.converges and close(out.value, inverse_along_block(prob).b, 1e-6)

    def test_zero(self):
        out = limit_with_rhs(make_problem(A1, D1), np.zeros((2, 1)))
        assert out.converges and np.allclose(out.value, 0)

    def test_outside_range(self):
        out = limit_with_rhs(make_problem(A1, D1), np.array([[0.0], [1.0]]))
        assert not out.converges and out.divergence_detected and out.value is None
        assert out.growth == pytest.approx(10.0, rel=1e-3)

    def test_lhs(self):
        a, d = existence_instance(5, 3)
        prob = make_problem(a, d)
        b = inverse_along_block(prob).b
        out = limit_with_lhs(prob, d)
        assert out.converges and close(out.value, b, 1e-6)
        assert limit_with_lhs(prob, np.zeros((1, 3))).converges
        bad = limit_with_lhs(make_problem(A1, D1), np.array([[0.0, 1.0]]))
        assert not bad.converges and bad.divergence_detected

    @given(seeds, sizes)
    def test_value_independent_of_inner_inverse(self, seed, n):
        a, d = existence_instance(seed, n)
        f = d @ rng_for(seed, 9).standard_normal((n, 2))
        p1, p2 = make_problem(a, d), make_problem(a, d, random_inner_inverse(d, seed))
        b = inverse_along_block(p1).b
        out = limit_with_rhs(p1, f)
        assert out.converges
        for prob in (p1, p2):
            assert close(out.value, b @ prob.g @ f, 1e-6)

    @given(seeds, sizes)
    def test_divergence(self, seed, n):
        a, d = existence_instance(seed, n, r=max(1, n - 1))
        prob = make_problem(a, d)
        f = outside_range_rhs(rng_for(seed, 10), d, prob.p)
        out = limit_with_rhs(prob, f)
        assert not out.converges and out.divergence_detected


class TestSeries:
    def test_a1_d1(self):
        res = inverse_along_series(make_problem(A1, D1), SeriesParams(1.0))
        assert close(res.b, D1, 1e-14)
        assert res.history[-1]["n"] == 1

    def test_identity(self):
        assert close(inverse_along_series(make_problem(np.eye(2), np.eye(2)), SeriesParams(1.0)).b, np.eye(2))

    def test_contraction_failed(self):
        with pytest.raises(ContractionFailed):
            inverse_along_series(make_problem(np.eye(2), np.eye(2)), SeriesParams(3.0))

    def test_max_terms(self):
        a, d = existence_instance(2, 4, family="positive")
        prob = make_problem(a, d)
        beta, q = auto_beta(prob)
        with pytest.raises(MaxTermsExceeded):
            inverse_along_series(prob, SeriesParams(beta, max_terms=2))

    @pytest.mark.parametrize("seed", range(20))
    def test_positive_family(self, seed):
        a, d = existence_instance(seed, 2 + seed % 5, family="positive")
        prob = make_problem(a, d)
        beta, q = auto_beta(prob)
        assert q < 1
        res = inverse_along_series(prob, SeriesParams(beta))
        assert close(res.b, inverse_along_block(prob).b, 1e-8)
        assert res.extra["form_gap"] <= 1e-10

    @pytest.mark.parametrize("seed", range(10))
    def test_geometric_tail(self, seed):
        a, d = existence_instance(seed, 4, family="positive")
        prob = make_problem(a, d)
        beta, q = auto_beta(prob)
        b = inverse_along_block(prob).b
        dap = d @ a @ prob.p
        # error after n terms <= ||(beta dap)^-1 in pRp|| q^(n+1) ||d|| / (1 - q)
        winv = op_norm(exists_along(prob).w) / abs(beta)
        for n, total, _ in series_partial_sums(prob, beta):
            if n > 40:
                break
            assert op_norm(total - b) <= winv * q ** (n + 1) * op_norm(d) / (1 - q) * abs(beta) + 1e-12
        assert contraction_factor(prob, beta) == q


class TestIntegral:
    @pytest.mark.parametrize("route", [inverse_along_integral, inverse_along_integral_mirror])
    def test_examples(self, route):
        assert close(route(make_problem(np.eye(2), np.eye(2))).b, np.eye(2), 1e-11)
        assert close(route(make_problem(A1, D1)).b, D1, 1e-11)
        with pytest.raises(SpectrumViolation):
            route(make_problem(-np.eye(2), np.eye(2)))

    def test_scalar_integral(self):
        res = inverse_along_integral(make_problem([[2.0]], [[1.0]]))
        assert res.b[0, 0] == pytest.approx(0.5, rel=1e-11)
        assert res.extra["tail"] <= 1e-11

    def test_not_converged(self):
        a, d = existence_instance(3, 4, family="positive")
        with pytest.raises(QuadratureNotConverged):
            inverse_along_integral(make_problem(a, d), QuadParams(nodes_per_panel=2, max_doublings=1))

    @pytest.mark.parametrize("seed", range(12))
    @pytest.mark.parametrize("family", ["positive", "near-positive"])
    def test_agrees(self, seed, family):
        a, d = existence_instance(seed, 2 + seed % 6, family=family)
        prob = make_problem(a, d)
        ref = inverse_along_block(prob).b
        for route in (inverse_along_integral, inverse_along_integral_mirror):
            res = route(prob)
            assert close(res.b, ref, 1e-10)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from alonginv.corpus import existence_instance, random_invertible, random_rank, rng_for
from alonginv.errors import InputError, NotInvertibleAlong
from alonginv.inner import random_inner_inverse
from alonginv.mary import (
    definition_check,
    exists_along,
    group_inverse_ad,
    group_inverse_da,
    inverse_along_block,
    inverse_along_spectral,
    inverse_along_spectral_mirror,
    make_problem,
    spectral_idempotent_ad,
    spectral_idempotent_da,
)
from alonginv.numeric import DEFAULT_TOL, adjoint, op_norm
from alonginv.spaces import left_null_space_equal, null_space_equal, range_equal, row_range_equal
from alonginv.zn import ZnMatrix, ZnSpace, zn_mary_inverse

from conftest import A1, D1, P1, SWAP, close

seeds = st.integers(0, 10_000)
sizes = st.integers(2, 8)


def instance(seed, n):
    return existence_instance(seed, n)


class TestExistence:
    def test_identity(self):
        rep = exists_along(make_problem(np.eye(2), np.eye(2)))
        assert rep.exists and close(rep.w, np.eye(2))

    def test_a1_d1(self):
        prob = make_problem(A1, D1, D1)
        rep = exists_along(prob)
        assert close(prob.p, D1) and close(rep.v, np.eye(2))
        assert rep.exists and close(rep.w, D1)

    def test_swap_fails(self):
        prob = make_problem(SWAP, D1, D1)
        assert close(prob.d @ prob.a @ prob.p, np.zeros((2, 2)))
        rep = exists_along(prob)
        assert not rep.exists and rep.w is None
        assert close(rep.v, np.diag([0.0, 1.0]))

    @given(seeds, sizes)
    def test_corner_inverse_contract(self, seed, n):
        a, d = instance(seed, n)
        prob = make_problem(a, d)
        rep = exists_along(prob)
        dap = d @ a @ prob.p
        k = rep.cond_v
        assert op_norm(rep.w @ dap - prob.p) <= DEFAULT_TOL.eq_tol * k
        assert op_norm(dap @ rep.w - prob.p) <= DEFAULT_TOL.eq_tol * k

    def test_bad_inner_inverse_rejected(self):
        with pytest.raises(InputError):
            make_problem(A1, D1, np.zeros((2, 2)))

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            make_problem(np.eye(2), np.eye(3))


class TestBlock:
    def test_examples(self):
        assert close(inverse_along_block(make_problem(np.eye(2), np.eye(2))).b, np.eye(2))
        assert close(inverse_along_block(make_problem(A1, D1)).b, D1)

    @given(seeds, sizes)
    def test_along_identity_is_inverse(self, seed, n):
        a = random_invertible(rng_for(seed), n)
        assert close(inverse_along_block(make_problem(a, np.eye(n))).b, np.linalg.inv(a), 1e-9)

    def test_nonexistence_raises(self):
        with pytest.raises(NotInvertibleAlong):
            inverse_along_block(make_problem(SWAP, D1))

    def test_zero_d(self):
        res = inverse_along_block(make_problem(A1, np.zeros((2, 2))))
        assert np.array_equal(res.b, np.zeros((2, 2)))

    def test_matches_exact_ring_brute_force(self):
        b = zn_mary_inverse(ZnMatrix(A1.real.astype(int), 5), ZnMatrix(D1.real.astype(int), 5))
        assert np.array_equal(b.data, inverse_along_block(make_problem(A1, D1)).b.real.round().astype(int))

    def test_residuals_recomputed(self):
        res = inverse_along_block(make_problem(A1, D1))
        assert set(res.residuals) == {"outer", "bad", "dab"}
        assert max(res.residuals.values()) < 1e-14
        js = res.to_json()
        assert js["method"] == "block" and js["matrix"]["rows"] == 2


class TestSpectral:
    def test_idempotent_examples(self):
        assert close(spectral_idempotent_da(make_problem(np.eye(2), np.eye(2))), np.zeros((2, 2)))
        prob = make_problem(A1, D1)
        assert close(group_inverse_da(prob), P1)
        assert close(spectral_idempotent_da(prob), [[0, -1], [0, 1]])
        assert close(spectral_idempotent_da(make_problem(np.zeros((2, 2)), np.zeros((2, 2)))), np.eye(2))

    @pytest.mark.parametrize("t", [1, 2, 5])
    def test_a1_d1(self, t):
        assert close(inverse_along_spectral(make_problem(A1, D1), t).b, D1)
        assert close(inverse_along_spectral_mirror(make_problem(A1, D1), t).b, D1)

    def test_explicit_t2_resolvent(self):
        prob = make_problem(A1, D1)
        res = prob.d @ prob.a + 2 * spectral_idempotent_da(prob)
        assert close(res, [[1, -1], [0, 2]])
        assert close(np.linalg.inv(res), [[1, 0.5], [0, 0.5]])

    def test_identity_t5(self):
        assert close(inverse_along_spectral(make_problem(np.eye(2), np.eye(2)), 5).b, np.eye(2))

    def test_mirror_zero(self):
        z = np.zeros((2, 2))
        assert np.array_equal(inverse_along_spectral_mirror(make_problem(z, z), 1).b, z)

    def test_t_zero_rejected(self):
        with pytest.raises(InputError, match="nonzero"):
            inverse_along_spectral(make_problem(A1, D1), 0)
        with pytest.raises(InputError):
            inverse_along_spectral_mirror(make_problem(A1, D1), 0.0)

    def test_nonexistence(self):
        with pytest.raises(NotInvertibleAlong):
            inverse_along_spectral(make_problem(SWAP, D1))
        with pytest.raises(NotInvertibleAlong):
            inverse_along_spectral_mirror(make_problem(SWAP, D1))

    @given(seeds, sizes)
    def test_group_inverse_equations(self, seed, n):
        a, d = instance(seed, n)
        prob = make_problem(a, d)
        k = exists_along(prob).cond_v ** 2
        for x, y in ((d @ a, group_inverse_da(prob)), (a @ d, group_inverse_ad(prob))):
            scale = max(1.0, op_norm(x)) * max(1.0, op_norm(y)) ** 2
            assert op_norm(x @ y @ x - x) <= 1e-9 * k * scale
            assert op_norm(y @ x @ y - y) <= 1e-9 * k * scale
            assert op_norm(x @ y - y @ x) <= 1e-9 * k * scale
        for pi in (spectral_idempotent_da(prob), spectral_idempotent_ad(prob)):
            assert op_norm(pi @ pi - pi) <= 1e-9 * k * max(1.0, op_norm(pi)) ** 2

    @given(seeds, sizes)
    def test_routes_agree_and_t_independent(self, seed, n):
        a, d = instance(seed, n)
        prob = make_problem(a, d)
        ref = inverse_along_block(prob)
        k = ref.cond
        for t in (1, -1, 0.5, 2j):
            assert close(inverse_along_spectral(prob, t).b, ref.b, 1e-9 * k)
            assert close(inverse_along_spectral_mirror(prob, t).b, ref.b, 1e-9 * k)


class TestDefinition:
    def test_examples(self):
        assert definition_check(np.eye(2), np.eye(2), np.eye(2))
        assert definition_check(A1, D1, D1)
        assert not definition_check(A1, D1, np.zeros((2, 2)))

    def test_wrong_range(self):
        assert not definition_check(np.eye(2), D1, np.diag([0.0, 1.0]))

    @given(seeds, sizes)
    def test_block_properties(self, seed, n):
        a, d = instance(seed, n)
        b = inverse_along_block(make_problem(a, d)).b
        assert definition_check(a, d, b)
        scale = DEFAULT_TOL.eq_tol * max(1.0, op_norm(d))
        assert op_norm(b @ a @ d - d) <= scale and op_norm(d @ a @ b - d) <= scale
        assert range_equal(b, d) and row_range_equal(b, d)
        assert null_space_equal(b, d) and left_null_space_equal(b, d)

    @given(seeds, sizes)
    def test_involution_symmetry(self, seed, n):
        a, d = instance(seed, n)
        p1, p2 = make_problem(a, d), make_problem(adjoint(a), adjoint(d))
        k = exists_along(p1).cond_v
        assert close(adjoint(inverse_along_block(p1).b), inverse_along_block(p2).b, 1e-9 * k)

    @pytest.mark.parametrize("seed", range(100))
    def test_independent_of_inner_inverse(self, seed):
        n = 2 + seed % 7
        a, d = instance(seed, n)
        p_mp = make_problem(a, d)
        p_rand = make_problem(a, d, random_inner_inverse(d, seed))
        k = max(exists_along(p_mp).cond_v, exists_along(p_rand).cond_v)
        assert close(inverse_along_block(p_mp).b, inverse_along_block(p_rand).b, 1e-8 * k)


def _denominator(b, limit=2000):
    for den in range(1, limit + 1):
        if np.allclose(den * b, np.round((den * b).real), atol=1e-8):
            return den
    return None


@pytest.mark.parametrize("modulus", [2, 3, 5])
def test_lifted_integer_pairs_match_exact_ring(modulus):
    """Integer pairs lifted to C.  When the certificate (g, w, b = w d) is rational with
    denominators prime to the modulus, every identity behind bab = b, bR = dR, Rb = Rd
    survives reduction, so the reduction of b is exactly the brute-force answer."""
    space = ZnSpace(2, 2, modulus)
    rng = np.random.default_rng(modulus)
    checked = 0
    for ac, dc in rng.integers(0, space.count, (80, 2)):
        a, d = space.matrix(ac), space.matrix(dc)
        prob = make_problem(a.data.astype(complex), d.data.astype(complex))
        if not exists_along(prob).exists:
            continue
        b = inverse_along_block(prob).b
        dens = [_denominator(x) for x in (prob.g, exists_along(prob).w, b)]
        if None in dens or any(np.gcd(x, modulus) != 1 for x in dens):
            continue
        den = dens[-1]
        num = np.round((den * b).real).astype(np.int64)
        reduced = ZnMatrix(num * pow(den, -1, modulus), modulus)
        assert zn_mary_inverse(a, d, space=space) == reduced
        checked += 1
    assert checked >= 20

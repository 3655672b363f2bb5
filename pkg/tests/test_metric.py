from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from betapot.errors import ContractError, DomainError
from betapot.metric import (
    BetaParams,
    BetaSphericalCoord,
    angular_constant_exact,
    ball_volume_exact,
    beta_distance,
    beta_norm,
    beta_sphere_jacobian,
    beta_sphere_map,
    homogeneity_scale,
    in_ball,
    quasi_triangle_constant,
)

betas = st.lists(st.floats(0.5, 3.0), min_size=1, max_size=4).map(lambda b: BetaParams(tuple(b)))


def points(n, lo=-10.0, hi=10.0):
    return st.lists(st.floats(lo, hi, allow_nan=False), min_size=n, max_size=n).map(np.asarray)


class TestBetaParams:
    def test_derived_fields(self):
        bp = BetaParams((1.0, 1.5))
        assert bp.n == 2 and bp.abs_beta == 2.5 and bp.a == 2.5 and bp.beta_min == 1.0

    def test_rejects_small_beta(self):
        with pytest.raises(ContractError):
            BetaParams((0.4, 1.0))

    def test_rejects_empty(self):
        with pytest.raises(ContractError):
            BetaParams(())

    @given(betas)
    def test_a_at_least_one(self, bp):
        assert bp.a >= 1.0 - 1e-15

    @given(betas)
    def test_k_recomputed(self, bp):
        k = 2.0 ** ((1 + 1 / bp.beta_min) ** (bp.abs_beta / bp.n))
        assert math.isclose(bp.k, k, rel_tol=1e-12)

    def test_k_overflow_is_inf(self):
        bp = BetaParams((0.5, 400.0))
        assert math.isinf(bp.k) and math.isfinite(bp.log2_k)


class TestDistance:
    def test_examples(self, iso2):
        assert beta_distance([0, 0], [3, 4], iso2) == 5.0
        assert beta_distance([0, 0], [1, 1], BetaParams((1.0, 1.0))) == 2.0
        assert beta_distance([0.3, -2.0], [0.3, -2.0], iso2) == 0.0

    def test_dimension_mismatch(self, iso2):
        with pytest.raises(ContractError):
            beta_distance([0, 0, 0], [1, 1], iso2)

    @given(betas.flatmap(lambda bp: st.tuples(st.just(bp), points(bp.n), points(bp.n))))
    def test_symmetry_and_identity(self, args):
        bp, x, y = args
        assert beta_distance(x, y, bp) == beta_distance(y, x, bp)
        assert beta_distance(x, x, bp) == 0.0

    @given(betas.flatmap(lambda bp: st.tuples(st.just(bp), points(bp.n), points(bp.n), points(bp.n))))
    def test_quasi_triangle(self, args):
        bp, x, y, z = args
        lhs = beta_distance(x, z, bp)
        rhs = beta_distance(x, y, bp) + beta_distance(y, z, bp)
        assert lhs <= bp.k * rhs * (1 + 1e-12) + 1e-300

    @given(betas.flatmap(lambda bp: st.tuples(st.just(bp), points(bp.n, -1e3, 1e3), st.floats(1e-3, 1e3))))
    def test_homogeneity(self, args):
        bp, x, t = args
        lhs = beta_norm(homogeneity_scale(x, t, bp), bp)
        rhs = t ** (bp.abs_beta / bp.n) * beta_norm(x, bp)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)

    @given(st.integers(1, 4).flatmap(lambda n: st.tuples(points(n), points(n))))
    def test_isotropic_is_euclidean(self, args):
        x, y = args
        bp = BetaParams.isotropic(len(x))
        assert beta_distance(x, y, bp) == pytest.approx(float(np.linalg.norm(x - y)), rel=1e-12, abs=1e-12)


class TestQuasiTriangleConstant:
    def test_examples(self):
        assert quasi_triangle_constant(BetaParams((0.5, 0.5))) == pytest.approx(2 ** math.sqrt(3), rel=1e-12)
        assert quasi_triangle_constant(BetaParams((1.0, 1.0))) == pytest.approx(4.0, rel=1e-12)
        for n in (1, 3, 5):
            assert quasi_triangle_constant(BetaParams.isotropic(n)) == pytest.approx(2 ** math.sqrt(3), rel=1e-12)


class TestHomogeneity:
    def test_examples(self, iso2):
        assert np.array_equal(homogeneity_scale([1.0, 2.0], 1.0, iso2), [1.0, 2.0])
        x = homogeneity_scale([1.0, 0.0], 4.0, iso2)
        assert np.allclose(x, [2.0, 0.0]) and beta_norm(x, iso2) == pytest.approx(2.0)

    def test_domain(self, iso2):
        with pytest.raises(DomainError):
            homogeneity_scale([1.0, 0.0], 0.0, iso2)

    def test_vectorised_t(self, aniso2):
        x = np.ones((3, 2))
        t = np.array([1.0, 2.0, 3.0])
        out = homogeneity_scale(x, t, aniso2)
        for i in range(3):
            assert np.allclose(out[i], homogeneity_scale(x[i], t[i], aniso2))


class TestChart:
    def test_origin_and_isotropic(self, iso2):
        assert np.allclose(beta_sphere_map(BetaSphericalCoord(0.0, (0.3,)), iso2), 0.0)
        x = beta_sphere_map(BetaSphericalCoord(1.0, (math.pi / 4,), (1, 1)), iso2)
        assert np.allclose(x, [math.cos(math.pi / 4), math.sin(math.pi / 4)])
        assert beta_norm(x, iso2) == pytest.approx(1.0)

    @given(betas.filter(lambda b: b.n >= 2).flatmap(lambda bp: st.tuples(
        # coordinates scale like rho^(2 beta_i); tiny rho would underflow float64
        st.just(bp), st.one_of(st.just(0.0), st.floats(1e-6, 5.0)),
        st.lists(st.floats(0.0, math.pi / 2), min_size=bp.n - 1, max_size=bp.n - 1),
        st.lists(st.sampled_from((1, -1)), min_size=bp.n, max_size=bp.n))))
    def test_round_trip(self, args):
        bp, rho, ang, signs = args
        x = beta_sphere_map(BetaSphericalCoord(rho, tuple(ang), tuple(signs)), bp)
        assert beta_norm(x, bp) == pytest.approx(rho ** (2 * bp.abs_beta / bp.n), rel=1e-10, abs=1e-300)

    def test_negative_factor_rejected(self, aniso2):
        with pytest.raises(DomainError):
            beta_sphere_map(BetaSphericalCoord(1.0, (3.0,)), BetaParams((0.75, 1.0)))

    def test_angle_range(self, iso2):
        with pytest.raises(DomainError):
            BetaSphericalCoord(1.0, (7.0,)).validate(iso2)
        with pytest.raises(DomainError):
            BetaSphericalCoord(-1.0, (0.0,)).validate(iso2)

    def test_isotropic_jacobian(self, iso2):
        # rho^{n-1} for n = 2 with unit angular density
        assert beta_sphere_jacobian(BetaSphericalCoord(0.7, (0.4,)), iso2) == pytest.approx(0.7)

    @pytest.mark.parametrize("beta", [(1.0, 1.0), (1.0, 1.5), (0.5, 0.5)])
    def test_jacobian_volume(self, beta):
        bp = BetaParams(beta)
        # rho_max = r^{n/(2|beta|)} = 1 for r = 1; four orthants
        val, _ = integrate.dblquad(
            lambda phi, rho: beta_sphere_jacobian(BetaSphericalCoord(rho, (phi,)), bp), 0.0, 1.0, 0.0, math.pi / 2
        )
        assert 4 * val == pytest.approx(ball_volume_exact(1.0, bp), rel=1e-8)

    def test_jacobian_volume_monte_carlo(self, rng):
        bp = BetaParams((1.0, 1.0))
        y = 2 * rng.random((400_000, 2)) - 1
        mc = 4.0 * float(np.mean(in_ball(y, [0, 0], 1.0, bp)))
        assert mc == pytest.approx(ball_volume_exact(1.0, bp), rel=0.01)

    def test_volume_scales_as_r_n(self, aniso2):
        r = 2.0 ** -np.arange(8)
        v = [ball_volume_exact(float(t), aniso2) for t in r]
        assert np.polyfit(np.log(r), np.log(v), 1)[0] == pytest.approx(2.0, abs=0.02)

    def test_n1_chart(self):
        bp = BetaParams((0.75,))
        x = beta_sphere_map(BetaSphericalCoord(2.0, (), (-1,)), bp)
        assert np.allclose(x, [-(2.0 ** 1.5)])

    def test_angular_constant(self, iso2):
        assert angular_constant_exact(iso2) == pytest.approx(2 * math.pi)


class TestInBall:
    def test_examples(self, iso2):
        assert in_ball([0.2, 0.1], [0.2, 0.1], 0.5, iso2)
        assert not in_ball([1.0, 0.0], [0.0, 0.0], 1.0, iso2)
        assert not in_ball([0.9, 0.9], [0.0, 0.0], 1.0, iso2)

    def test_domain(self, iso2):
        with pytest.raises(DomainError):
            in_ball([0, 0], [0, 0], 0.0, iso2)


@settings(max_examples=25)
@given(betas)
def test_ball_volume_matches_dirichlet_for_n1(bp):
    if bp.n == 1:
        # B = (-r^{1/a}... ) gives |x|^{1/beta} < r^{2/a}, so |x| < r; length 2r
        assert ball_volume_exact(1.3, bp) == pytest.approx(2.6)

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betapot.errors import ContractError, DivergenceError, DomainError
from betapot.fields import ScalarField, make_field, power_weight
from betapot.metric import BetaParams, angular_constant_exact, ball_volume_exact, beta_norm
from betapot.quadrature import (
    QuadratureConfig,
    RadialKernel,
    angular_constant,
    ball_nodes,
    integrate_annulus,
    integrate_ball,
    integrate_ball_mc,
    integrate_singular,
    ladder_edges,
    ladder_integrals,
    radial_integral,
    sphere_rule,
)


def ones(n):
    return ScalarField("one", n, lambda x: np.ones(x.shape[:-1]))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ContractError):
            QuadratureConfig(rel_tol=0)
        with pytest.raises(ContractError):
            QuadratureConfig(angular_order=1)

    def test_coarse_refined(self):
        c = QuadratureConfig()
        assert c.coarse().angular_order == 16 and c.refined().radial_order == 128


class TestSphereRule:
    @pytest.mark.parametrize("beta", [(0.5, 0.5), (1.0, 1.5), (0.5, 0.5, 0.5), (0.75, 1.0, 2.0), (0.8,)])
    def test_points_on_unit_sphere_and_constant(self, beta):
        bp = BetaParams(beta)
        u, _ = sphere_rule(bp, 12)
        assert np.allclose(beta_norm(u, bp), 1.0, atol=1e-12)
        # 2 beta_i - 1 non-integer leaves an endpoint singularity in the angles: algebraic convergence
        assert angular_constant(bp, 32) == pytest.approx(angular_constant_exact(bp), rel=5e-5)

    def test_constant_converges_with_order(self):
        bp = BetaParams((0.75, 1.0, 2.0))
        errs = [abs(angular_constant(bp, k) / angular_constant_exact(bp) - 1) for k in (8, 16, 32)]
        assert errs[2] < errs[1] < errs[0]


class TestRadial:
    def test_power(self):
        v, _ = radial_integral(lambda t: t**-1.5, 1.0, 2)
        assert v == pytest.approx(2.0, rel=1e-10)

    def test_divergent(self):
        with pytest.raises(DivergenceError):
            radial_integral(lambda t: t**-2.5, 1.0, 2)

    def test_lower_limit(self):
        v, _ = radial_integral(lambda t: np.ones_like(t), 2.0, 3, t_lo=1.0)
        assert v == pytest.approx(7.0 / 3.0)


class TestBall:
    @pytest.mark.parametrize("beta", [(0.5, 0.5), (1.0, 1.0), (1.0, 1.5)])
    def test_volume_chart(self, beta):
        bp = BetaParams(beta)
        res = integrate_ball(ones(2), [0.3, -0.2], 0.7, bp)
        assert res.value == pytest.approx(ball_volume_exact(0.7, bp), rel=1e-8)

    def test_domain(self, iso2):
        with pytest.raises(DomainError):
            integrate_ball(ones(2), [0, 0], -1.0, iso2)

    def test_mc_agrees(self, aniso2):
        g = make_field("gaussian", aniso2)
        q = integrate_ball(g, [0.1, 0.0], 1.0, aniso2)
        mc = integrate_ball_mc(g, [0.1, 0.0], 1.0, aniso2, 200_000, seed=3)
        assert abs(q.value - mc.value) <= 4 * math.hypot(q.error_estimate, mc.error_estimate)

    def test_mc_deterministic(self, iso2):
        a = integrate_ball_mc(ones(2), [0, 0], 1.0, iso2, 10_000, seed=5)
        b = integrate_ball_mc(ones(2), [0, 0], 1.0, iso2, 10_000, seed=5)
        assert a == b

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.1, 1.8), st.floats(0.05, 2.0))
    def test_singular_closed_form(self, s, r):
        bp = BetaParams.isotropic(2)
        res = integrate_singular(make_field("const", bp), s, [0, 0], r, bp)
        assert res.value == pytest.approx(2 * math.pi * r ** (2 - s) / (2 - s), rel=1e-8)

    def test_singular_off_centre_chart(self, iso2):
        # f = 1 is radial about every point; the box-truncated one is not
        f = make_field("const", iso2, half_width=5.0)
        res = integrate_singular(f, 0.5, [0.1, 0.2], 1.0, iso2)
        assert res.value == pytest.approx(2 * math.pi / 1.5, rel=1e-4)

    def test_singular_divergent(self, iso2):
        with pytest.raises(DivergenceError):
            integrate_singular(make_field("const", iso2), 2.5, [0, 0], 1.0, iso2)

    def test_weighted_kernel(self, iso2):
        res = integrate_singular(make_field("const", iso2), 0.5, [0, 0], 1.0, iso2, weight=power_weight(0.5))
        assert res.value == pytest.approx(2 * math.pi, rel=1e-8)

    def test_annulus_additivity(self, aniso2):
        g = make_field("gaussian", aniso2)
        a = integrate_annulus(g, [0.1, 0.0], 0.25, 1.0, aniso2).value
        b = integrate_ball(g, [0.1, 0.0], 1.0, aniso2).value - integrate_ball(g, [0.1, 0.0], 0.25, aniso2).value
        assert a == pytest.approx(b, rel=1e-8)


class TestLadder:
    def test_edges(self):
        e = ladder_edges(1.0, 3)
        assert np.allclose(e, [1, 0.5, 0.25, 0.125, 0.0625])

    def test_cumulative_matches_ball(self, iso2):
        li = ladder_integrals(make_field("const", iso2), [0.0, 0.0], 1.0, 6, [RadialKernel(0.5)], iso2,
                              QuadratureConfig())
        vals, _ = li.cumulative()
        assert np.allclose(vals[0], 4 * math.pi / 3 * li.radii**1.5, rtol=1e-8)

    def test_ball_nodes_volume(self, aniso2):
        nodes = ball_nodes([0.0, 0.0], 1.0, aniso2, 6, 8, 8)
        core = ball_volume_exact(nodes.core_radius, aniso2)
        assert nodes.weights.sum() + core == pytest.approx(ball_volume_exact(1.0, aniso2), rel=1e-8)

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betapot.errors import ContractError, DivergenceError, DomainError
from betapot.fields import ScalarField, make_example1_field, make_field
from betapot.metric import BetaParams, angular_constant_exact, ball_volume_exact
from betapot.quadrature import QuadratureConfig
from betapot.spaces import (
    CenterGrid,
    ModulusCurve,
    check_lemma1,
    check_lemma1_converse,
    classify_growth,
    doubling_constant,
    fit_tail,
    kernel_exponent,
    lemma1_constant,
    make_center_grid,
    morrey_norm,
    stummel_modulus,
)

ORIGIN = CenterGrid(((0.0, 0.0),))


class TestCurve:
    def test_invariants(self):
        with pytest.raises(ContractError):
            ModulusCurve([1.0, 2.0], [1.0, 1.0], "eta")
        with pytest.raises(ContractError):
            ModulusCurve([1.0, 0.5], [1.0, -1.0], "eta")
        with pytest.raises(ContractError):
            ModulusCurve([1.0, 0.5], [1.0, 1.0], "bogus")

    def test_csv_round_trip(self, tmp_path):
        c = ModulusCurve([1.0, 0.5, 0.25], [3.0, 1.0, 0.3], "xi", argmax=np.array([0, 2, 1]))
        p = tmp_path / "c.csv"
        c.write_csv(p)
        text = p.read_text()
        assert text.splitlines()[1] == "radius,value,center_argmax_index"
        d = ModulusCurve.read_csv(p)
        assert d.kind == "xi" and np.allclose(d.values, c.values) and list(d.argmax) == [0, 2, 1]

    def test_interpolation_and_tail(self):
        r = 2.0 ** -np.arange(12)
        c = ModulusCurve(r, 3.0 * r**1.5, "eta")
        assert c(0.3) == pytest.approx(3.0 * 0.3**1.5, rel=1e-12)
        assert c(1e-6) == pytest.approx(3.0 * 1e-12**0.75, rel=1e-6)
        assert c(5.0) == pytest.approx(3.0)

    def test_fit_tail_logpower(self):
        r = np.exp(-3.0) * 2.0 ** -np.arange(30)
        v = (-np.log(r)) ** -5.0
        tm = fit_tail(r, v)
        assert tm.kind == "logpower" and tm.exponent == pytest.approx(5.0, rel=1e-3)


class TestStummel:
    def test_const_closed_form(self, iso2):
        eta = stummel_modulus(make_field("const", iso2), 1.5, iso2, ORIGIN, 1.0, 10)
        assert np.allclose(eta.values, 4 * math.pi / 3 * eta.radii**1.5, rtol=5e-3)

    def test_zero(self, iso2):
        eta = stummel_modulus(make_field("zero", iso2), 1.5, iso2, None, 1.0, 5)
        assert np.all(eta.values == 0)

    def test_monotone_eta(self, aniso2):
        eta = stummel_modulus(make_field("gaussian", aniso2), 1.5, aniso2, None, 1.0, 10)
        assert eta.is_monotone()

    def test_example1_bound(self, iso2):
        f = make_example1_field(iso2)
        eta = stummel_modulus(f, 2.0, iso2, make_center_grid(f, iso2), math.exp(-3), 20, convention="paper-literal")
        C = angular_constant_exact(iso2)
        L = 2 * C * (-np.log(np.minimum(eta.radii, math.exp(-3)))) ** -5.0
        assert np.all(eta.values <= L)

    def test_precondition(self, iso2):
        with pytest.raises(ContractError):
            stummel_modulus(make_field("const", iso2), 1.0, iso2, ORIGIN, 1.0, 4)

    def test_divergence(self, iso2):
        with pytest.raises(DivergenceError):
            stummel_modulus(make_field("power", iso2, s=1.9), 1.5, iso2, ORIGIN, 1.0, 4)

    def test_grid_includes_singularities(self, iso2):
        f = make_field("power", iso2, s=0.5, center=(0.3, -0.1), radius=1.0)
        g = make_center_grid(f, iso2)
        assert g.centers[0] == (0.3, -0.1)

    def test_dilation_scaling(self, aniso2):
        # f_t(x) = f(delta_{1/t} x) with t^{|beta|/n} = 2 shifts the ladder by one rung
        g = make_field("gaussian", aniso2)
        t = 2.0 ** (aniso2.n / aniso2.abs_beta)
        ft = ScalarField("dilate", 2, lambda x: g(x * t ** -aniso2.beta_array))
        p = 1.5
        s = kernel_exponent(p, aniso2)
        cfg = QuadratureConfig()
        e1 = stummel_modulus(g, p, aniso2, ORIGIN, 1.0, 8, cfg)
        e2 = stummel_modulus(ft, p, aniso2, ORIGIN, 2.0, 8, cfg)
        pred = t**aniso2.abs_beta * 2.0**-s * e1.values
        assert np.allclose(e2.values, pred, rtol=1e-3)


class TestMorrey:
    def test_zero(self, iso2):
        assert morrey_norm(make_field("zero", iso2), 1.0, iso2, ORIGIN, 1.0, 5).value == 0.0

    def test_const_lambda_n(self, iso2):
        f = make_field("const", iso2, half_width=10.0)
        est = morrey_norm(f, 2.0 - 1e-12, iso2, ORIGIN, 1.0, 8)
        assert est.value == pytest.approx(math.pi, rel=1e-4)
        assert est.bounded

    def test_precondition(self, iso2):
        with pytest.raises(ContractError):
            morrey_norm(make_field("const", iso2), 2.5, iso2, ORIGIN, 1.0, 4)

    def test_example1_grows(self, iso2):
        f = make_example1_field(iso2)
        est = morrey_norm(f, 0.25, iso2, ORIGIN, math.exp(-3), 40, convention="paper-literal")
        assert est.status == "growing" and est.growth_exponent > 0

    def test_classify(self):
        r = 2.0 ** -np.arange(12)
        assert classify_growth(ModulusCurve(r, r**-0.5, "morrey-quotient"))[0] == "growing"
        assert classify_growth(ModulusCurve(r, np.ones(12), "morrey-quotient"))[0] == "bounded-on-ladder"


class TestLemma1Constant:
    def test_closed_form(self, iso2):
        assert lemma1_constant(2, 1.5, 1.75, iso2) == pytest.approx(2**0.5 / (1 - 2**-1.25), rel=1e-12)

    def test_divergent(self, iso2):
        with pytest.raises(DivergenceError):
            lemma1_constant(2, 1.5, 0.5, iso2)

    @given(st.floats(0.05, 0.4))
    def test_monotone_in_gap(self, gap):
        bp = BetaParams.isotropic(2)
        assert lemma1_constant(2, 1.5, 0.5 + 2 * gap, bp) < lemma1_constant(2, 1.5, 0.5 + gap, bp)

    def test_blows_up_at_boundary(self, iso2):
        assert lemma1_constant(2, 1.5, 0.5 + 1e-9, iso2) > 1e8


class TestLemma1Checks:
    def test_box_const(self, iso2):
        e, eta, mor = check_lemma1(make_field("const", iso2, half_width=0.5), 1.5, 1.75, iso2, J=10)
        assert e.status == "pass" and e.max_ratio < 1

    def test_zero(self, iso2):
        e, _, _ = check_lemma1(make_field("zero", iso2), 1.5, 1.75, iso2, ORIGIN, J=5)
        assert e.status == "pass"

    def test_gaussian_aniso(self, aniso2):
        e, _, _ = check_lemma1(make_field("gaussian", aniso2), 1.8, 1.5, aniso2, J=10)
        assert e.status == "pass"

    def test_converse_const(self, iso2):
        e = check_lemma1_converse(make_field("const", iso2, half_width=10.0), 1.5, None, iso2, ORIGIN, J=10)
        assert e.status == "pass"
        assert e.details["fitted_alpha"] == pytest.approx(1.5, rel=1e-3)
        assert e.details["lambda"] == pytest.approx(2.0, rel=1e-3)

    def test_converse_power(self, iso2):
        e = check_lemma1_converse(make_field("power", iso2, s=0.25), 1.5, None, iso2, ORIGIN, J=10)
        assert e.status == "pass"

    def test_converse_zero(self, iso2):
        assert check_lemma1_converse(make_field("zero", iso2), 1.5, None, iso2, ORIGIN, J=4).status == "pass"

    def test_converse_inconsistent_alpha(self, iso2):
        e = check_lemma1_converse(make_field("const", iso2, half_width=10.0), 1.5, 0.5, iso2, ORIGIN, J=6)
        assert e.status == "inconclusive"


class TestDoubling:
    def test_const_closed_form(self, iso2):
        eta = stummel_modulus(make_field("const", iso2), 1.5, iso2, ORIGIN, 1.0, 8)
        assert doubling_constant(eta) == pytest.approx(2**1.5, rel=1e-6)

    def test_constant_curve(self):
        r = 2.0 ** -np.arange(5)
        assert doubling_constant(ModulusCurve(r, np.ones(5), "eta")) == 1.0

    def test_zero_denominator(self):
        with pytest.raises(DomainError):
            doubling_constant(ModulusCurve(2.0 ** -np.arange(4), [1.0, 0.5, 0.0, 0.0], "eta"))

    def test_short(self):
        with pytest.raises(ContractError):
            doubling_constant(ModulusCurve([1.0, 0.5], [1.0, 0.5], "eta"))

    def test_example1_finite(self, iso2):
        f = make_example1_field(iso2)
        eta = stummel_modulus(f, 2.0, iso2, ORIGIN, math.exp(-3), 20, convention="paper-literal")
        cd = doubling_constant(eta)
        L = -np.log(eta.radii[:-1])
        assert math.isfinite(cd) and cd <= float(np.max(((L + math.log(2)) / L) ** 5)) * (1 + 1e-6)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.0, 1.2))
    def test_power_field_ratio(self, s):
        bp = BetaParams.isotropic(2)
        eta = stummel_modulus(make_field("power", bp, s=s), 1.5, bp, ORIGIN, 1.0, 6)
        assert doubling_constant(eta) == pytest.approx(2 ** (1.5 - s), rel=1e-6)

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betapot.errors import ContractError, SingularPointError
from betapot.fields import (
    EXAMPLE1_RADIUS,
    example1_profile,
    field_from_grid,
    gradient_field,
    gradient_magnitude,
    logpower_weight,
    make_example1_field,
    make_field,
    make_weight,
    power_weight,
    read_grid,
    read_grid_field,
    sample_to_grid,
    write_grid,
)
from betapot.metric import BetaParams, beta_norm


class TestExample1Field:
    def test_outside_support(self, iso2):
        f = make_example1_field(iso2)
        assert f([EXAMPLE1_RADIUS, 0.0]) == 0.0
        assert f([0.5, 0.5]) == 0.0

    def test_hand_value(self, iso2):
        f = make_example1_field(iso2)
        assert f([math.exp(-4), 0.0]) == pytest.approx(math.exp(8) / 4096, rel=1e-12)

    def test_singular_origin(self, iso2):
        f = make_example1_field(iso2)
        assert f.singularities == ((0.0, 0.0),)
        with pytest.raises(SingularPointError):
            f.value([0.0, 0.0])

    def test_support(self, iso2):
        assert make_example1_field(iso2).support == ((0.0, 0.0), EXAMPLE1_RADIUS)

    def test_needs_n2(self):
        with pytest.raises(ContractError):
            make_example1_field(BetaParams((0.5,)))

    def test_conventions_agree_isotropic(self):
        t = np.geomspace(1e-6, 0.04, 20)
        a = example1_profile(t, 3, "paper-literal", 1.0)
        b = example1_profile(t, 3, "generalized", 1.0)
        assert np.allclose(a, b)


class TestRegistry:
    @pytest.mark.parametrize("name", ["const", "gaussian", "power", "example1", "bump", "indicator",
                                      "quadratic", "linear", "zero"])
    def test_builds(self, name, iso2):
        f = make_field(name, iso2)
        v = f(np.array([[0.2, 0.1], [0.01, -0.02]]))
        assert v.shape == (2,) and np.all(np.isfinite(v))

    def test_unknown(self, iso2):
        with pytest.raises(ContractError):
            make_field("nope", iso2)

    def test_const_box(self, iso2):
        f = make_field("const", iso2, half_width=0.5)
        assert f([0.4, -0.4]) == 1.0 and f([0.6, 0.0]) == 0.0
        assert f.support[1] >= beta_norm([0.5, 0.5], iso2)

    def test_bump_support_contains_nonzero(self, aniso2, rng):
        f = make_field("bump", aniso2)
        y = rng.uniform(-1, 1, (20_000, 2))
        nz = f(y) > 0
        assert np.all(beta_norm(y[nz], aniso2) < f.support[1])

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.0, 1.9), st.floats(1e-3, 1.0))
    def test_power_field_value(self, s, t):
        bp = BetaParams.isotropic(2)
        f = make_field("power", bp, s=s)
        assert f([t, 0.0]) == pytest.approx(t**-s, rel=1e-12)

    def test_zero_flag(self, iso2):
        assert make_field("zero", iso2).is_zero
        assert not make_field("const", iso2).is_zero


class TestGradient:
    def test_examples(self, iso2):
        assert gradient_magnitude(make_field("linear", iso2), [0.3, 0.2]) == pytest.approx(1.0)
        assert gradient_magnitude(make_field("quadratic", iso2), [0.3, 0.4]) == pytest.approx(1.0)

    def test_bump_gradient_matches_finite_differences(self, iso2, rng):
        f = make_field("bump", iso2)
        g = gradient_field(f)
        x = rng.uniform(-0.3, 0.3, (10, 2))
        h = 1e-6
        fd = np.stack([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(2)], -1)
        assert np.allclose(g(x), np.linalg.norm(fd, axis=-1), atol=1e-6)

    def test_missing_gradient(self, iso2):
        with pytest.raises(ContractError):
            gradient_magnitude(make_field("indicator", iso2), [0.0, 0.0])


class TestGrid:
    def test_round_trip(self, tmp_path, iso2):
        f = make_field("bump", iso2)
        vals, grid = sample_to_grid(f, [-0.6, -0.6], [0.6, 0.6], 41)
        path = tmp_path / "g.txt"
        write_grid(path, vals, grid)
        v2, g2 = read_grid(path)
        assert np.array_equal(vals, v2) and g2 == grid
        gf = read_grid_field(path, iso2)
        x = np.array([[0.0, 0.0], [0.1, -0.2], [0.9, 0.0]])
        assert np.allclose(gf(x), f(x), atol=5e-3)
        assert gf([0.9, 0.0]) == 0.0

    def test_multilinear_is_exact_for_linear_data(self, iso2):
        vals, grid = sample_to_grid(make_field("linear", iso2), [0, 0], [1, 1], 5)
        gf = field_from_grid(vals + 2.0, grid, iso2)
        assert gf([0.37, 0.81]) == pytest.approx(2.37)

    def test_bad_header(self, tmp_path, iso2):
        p = tmp_path / "bad.txt"
        p.write_text("# n=2\n1\n2\n")
        with pytest.raises(ContractError):
            read_grid(p)


class TestWeights:
    def test_power(self):
        w = power_weight(0.5)
        assert w(4.0) == pytest.approx(2.0)

    def test_logpower_monotone_and_limit(self):
        w = logpower_weight(1.0)
        t = np.geomspace(1e-12, 1.0, 200)
        v = w(t)
        assert np.all(np.diff(v) >= 0) and v[0] < 0.2 and v[-1] == 1.0
        assert w.limit_zero and w.monotone

    def test_curve_weight(self, tmp_path, iso2):
        from betapot.spaces import stummel_modulus, CenterGrid

        eta = stummel_modulus(make_field("const", iso2), 1.5, iso2, CenterGrid(((0.0, 0.0),)), 1.0, 6)
        p = tmp_path / "c.csv"
        eta.write_csv(p)
        w = make_weight(f"curve:{p}", gamma=0.5)
        assert w(0.5) == pytest.approx(math.sqrt(4 * math.pi / 3 * 0.5**1.5), rel=1e-9)

    def test_unknown(self):
        with pytest.raises(ContractError):
            make_weight("nope")

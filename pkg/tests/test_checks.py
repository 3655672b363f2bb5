from __future__ import annotations

import math

import numpy as np
import pytest

from betapot import checks
from betapot.fields import const_field, make_example1_field, make_field, power_weight
from betapot.metric import BetaParams


def _status(entries):
    return {e.claim_id: e.status for e in entries}


def test_metric_axioms_small():
    es = checks.check_metric_axioms(n_triples=5000, betas_per_dim=2, seed=3)
    assert _status(es) == {k: "pass" for k in _status(es)}
    assert {e.claim_id for e in es} >= {"metric.identity", "metric.symmetry", "metric.quasi_triangle"}


def test_jacobian_mc_small(aniso2):
    es = checks.check_jacobian_mc(aniso2, n_samples=100_000, seed=1)
    assert all(e.passed for e in es)


def test_isotropic_reduction():
    assert all(e.passed for e in checks.check_isotropic_reduction(n_points=500, J=6))


def test_lemma2_closed_form(iso2):
    f = const_field(iso2)
    e = checks.check_lemma2(f, 1.5, iso2, J=8, closed_form=2**1.5)
    assert e.passed


def test_lemma3(iso2):
    assert checks.check_lemma3(make_field("gaussian", iso2), 1.5, 0.5, iso2, J=10).passed


def test_lemma3_zero(iso2):
    assert checks.check_lemma3(make_field("zero", iso2), 1.5, 0.5, iso2, J=4).status in ("pass", "skipped")


def test_growth_function(iso2):
    es = checks.check_growth_function(power_weight(1.0), 0.5, 1.5, iso2, I_phi=3.0, norm_p=2.0)
    assert all(e.passed for e in es)


def test_theorem1_iso(iso2):
    es = checks.check_theorem1(make_field("bump", iso2), const_field(iso2), power_weight(1.0), 0.5, 1.5, 1.0,
                               iso2, J=10, fubini=True)
    assert all(e.passed for e in es)


def test_theorem1_zero_field(iso2):
    es = checks.check_theorem1(make_field("zero", iso2), const_field(iso2), power_weight(1.0), 0.5, 1.5, 1.0,
                               iso2, J=6)
    assert all(e.status in ("pass", "skipped") for e in es)


def test_lemma4_bump(iso2):
    assert checks.check_lemma4(make_field("bump", iso2), 2.0, power_weight(0.5), iso2, n_points=20).passed


def test_lemma4_equality(iso2):
    f = make_field("indicator", iso2, radius=0.5, center=(0.1, 0.1))
    e = checks.check_lemma4(f, 2.0, power_weight(1.0), iso2, xs=[[0.1, 0.1]])
    assert e.passed and e.max_ratio == pytest.approx(1.0, rel=1e-3)


def test_sobolev_constant_near_euclidean(iso2):
    C, _ = checks.sobolev_constant(make_field("bump", iso2), iso2, per_axis=5)
    assert C == pytest.approx(1 / (2 * math.pi), rel=0.2)


def test_sobolev_zero(iso2):
    assert checks.check_sobolev_pointwise(make_field("zero", iso2), iso2).passed


def test_corollary_and_prop(iso2):
    es = checks.corollary1_and_prop1(make_field("bump", iso2), const_field(iso2), power_weight(1.0), 0.5, 1.5,
                                     1.0, iso2, J=10)
    assert [e.claim_id for e in es] == ["corollary1", "proposition1"]
    assert all(e.passed for e in es)


def test_corollary_zero_u(iso2):
    e = checks.check_corollary1(make_field("zero", iso2), const_field(iso2), power_weight(1.0), 0.5, 1.5, 1.0,
                                iso2, J=6)
    assert e.passed and e.lhs == [0.0]


@pytest.mark.parametrize("convention", ["paper-literal", "generalized"])
def test_example1(convention):
    es = {e.claim_id: e for e in checks.check_example1(J=40, convention=convention)}
    for k in ("example1.i", "example1.ii", "example1.iii"):
        assert es[k].passed, (k, es[k].details)
    assert es["example1.iii.endpoint"].status == "inconclusive"


def test_example1_field_profile(iso2):
    f = make_example1_field(iso2)
    x = np.array([[0.01, 0.0]])
    L = -math.log(0.01)
    assert float(f(x)[0]) == pytest.approx(1 / (0.01**2 * L**6), rel=1e-12)

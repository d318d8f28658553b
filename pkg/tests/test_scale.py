import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stricttest.coeffspec import LEFT, RIGHT, parse_problem
from stricttest.scale import (AUXILIARY, ORIGINAL, AnalysisOptions, ScaleAnalysis, build_scale,
                              describe_forms, feller_limit)
from stricttest.tri import Tri

NUMERIC = AnalysisOptions(use_asymptotics=False)
CROSS = AnalysisOptions(cross_check=True)


def drift_bm(c):
    return parse_problem(f"J=(-inf,inf); x0=0.3; param c={c}; mu=c; sigma=1")


@given(st.floats(min_value=0.2, max_value=2.0), st.floats(min_value=-2.0, max_value=2.0))
def test_scale_of_drifted_bm_matches_closed_form(c, x):
    spec = drift_bm(c)
    want = (1.0 - math.exp(-2 * c * (x - spec.c))) / (2 * c)
    assert build_scale(spec).s(x) == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_scale_limits_of_drifted_bm():
    b = build_scale(drift_bm(1.0))
    assert b.s_limit(LEFT).is_divergent
    assert b.s_limit(RIGHT).is_finite


def test_numeric_scale_limit_value():
    spec = drift_bm(1.0)
    v = ScaleAnalysis(spec, NUMERIC).s_limit(ORIGINAL, RIGHT)
    assert v.is_finite and v.value == pytest.approx(0.5, rel=1e-7)


def test_density_is_exponential_of_minus_phi():
    b = build_scale(drift_bm(0.7))
    xs = np.array([-1.0, 0.3, 2.0])
    np.testing.assert_allclose(b.rho(xs), np.exp(-1.4 * (xs - 0.3)), rtol=1e-9)


@pytest.mark.parametrize("text, exits", [
    ("J=(0,inf); x0=1; mu=0; sigma=1", (Tri.YES, Tri.NO)),
    ("J=(0,inf); x0=1; mu=1/x; sigma=1", (Tri.NO, Tri.NO)),
    ("J=(0,inf); x0=1; mu=0; sigma=x", (Tri.NO, Tri.NO)),
    ("J=(0,1); x0=0.5; mu=0; sigma=1", (Tri.YES, Tri.YES)),
    ("J=(-inf,inf); x0=0; mu=0; sigma=1+x^2", (Tri.NO, Tri.NO)),
], ids=["bm_halfline", "bessel3", "gbm", "bm_unit_interval", "quadratic_vol"])
@pytest.mark.parametrize("options", [AnalysisOptions(), NUMERIC, CROSS], ids=["default", "numeric", "cross"])
def test_exit_behaviour(text, exits, options):
    spec = parse_problem(text)
    got = tuple(feller_limit(spec, ORIGINAL, side, options).exits for side in (LEFT, RIGHT))
    assert got == exits


def test_v_route_and_s_route_agree():
    spec = parse_problem("J=(0,inf); x0=1; mu=0; sigma=x^1.5")
    for side in (LEFT, RIGHT):
        f = feller_limit(spec, ORIGINAL, side)
        assert f.v_limit.kind == f.s_route.kind
        assert f.diagnostic == ""


def test_auxiliary_bundle_adds_b_sigma_to_drift():
    # b sigma = 1 gives unit drift: s~ finite at +inf, infinite at -inf
    spec = parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=1")
    an = ScaleAnalysis(spec)
    assert an.s_limit(AUXILIARY, RIGHT).is_finite
    assert an.s_limit(AUXILIARY, LEFT).is_divergent
    assert an.s_limit(ORIGINAL, RIGHT).is_divergent


def test_slowly_varying_remainder_defers_to_quadrature():
    # 2mu/sigma^2 = 1/u + 1.05/(u log u): rho ~ 1/(u log^1.05 u), so s(inf) is finite
    spec = parse_problem("J=(3,inf); x0=4; mu=(1+1.05/log(x))/(2*x); sigma=1")
    v = ScaleAnalysis(spec).s_limit(ORIGINAL, RIGHT)
    assert v.route == "numeric"
    assert not v.is_divergent


def test_describe_forms_reports_density():
    text = describe_forms(parse_problem("J=(0,inf); x0=1; mu=1/x; sigma=1"), ORIGINAL, RIGHT)
    assert "rho 1*u^-2" in text

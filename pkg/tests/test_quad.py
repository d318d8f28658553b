import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stricttest.battery import DIVERGENT_CANARIES, QUAD_CLOSED_FORMS
from stricttest.quad import (EvaluationError, classify_increments, gauss_kronrod, integrate,
                             ladder_points, probe_tail)


@pytest.mark.parametrize("label, f, lo, hi, exact", QUAD_CLOSED_FORMS, ids=[c[0] for c in QUAD_CLOSED_FORMS])
def test_closed_forms(label, f, lo, hi, exact):
    v = integrate(f, lo, hi)
    assert v.is_finite, v
    assert abs(v.value - exact) <= 1e-8


@pytest.mark.parametrize("label, f, endpoint, side, start", DIVERGENT_CANARIES,
                         ids=[c[0] for c in DIVERGENT_CANARIES])
def test_divergent_canaries(label, f, endpoint, side, start):
    assert probe_tail(f, endpoint, side, start=start).is_divergent


def test_log_power_just_above_one_is_not_called_divergent():
    v = probe_tail(lambda x: 1.0 / (x * np.log(x) ** 1.05), math.inf, "right", start=math.e)
    assert not v.is_divergent


def test_exponential_growth_is_divergent():
    assert probe_tail(np.exp, math.inf, "right").is_divergent


def test_gauss_kronrod_polynomial_is_exact():
    val, err, ok = gauss_kronrod(lambda x: 3 * x ** 2 - x + 7, -1.0, 2.0)
    assert ok
    assert val == pytest.approx(28.5, rel=1e-14)
    assert err < 1e-12


def test_interior_failure_is_reported():
    def bad(x):
        if np.any(np.abs(np.asarray(x) - 0.5) < 0.3):
            raise ZeroDivisionError("boom")
        return np.ones_like(x)

    with pytest.raises(EvaluationError):
        integrate(bad, 0.0, 1.0)


def test_empty_interval_is_rejected():
    with pytest.raises(ValueError):
        integrate(np.exp, 1.0, 1.0)


def test_ladder_points_are_monotone_and_stay_inside():
    pts = ladder_points(1.0, math.inf)
    assert np.all(np.diff(pts) > 0) and np.all(np.isfinite(pts))
    pts = ladder_points(0.5, 0.0)
    assert np.all(np.diff(pts) < 0) and np.all(pts > 0)


def test_classify_increments_examples():
    assert classify_increments(0.5 ** np.arange(40)).kind == "finite"
    assert classify_increments(np.ones(40)).kind == "divergent"
    assert classify_increments(1.1 ** np.arange(40)).kind == "divergent"


@given(st.floats(min_value=-0.95, max_value=3.0))
def test_power_near_zero_matches_exponent(p):
    v = probe_tail(lambda x: x ** p, 0.0, "left", start=1.0)
    if v.is_conclusive:
        assert v.is_finite == (p > -1)
    if v.is_finite:
        assert v.value == pytest.approx(1.0 / (p + 1), rel=1e-7)


@given(st.floats(min_value=1.1, max_value=4.0))
def test_power_at_infinity_matches_exponent(p):
    v = probe_tail(lambda x: x ** -p, math.inf, "right", start=1.0)
    assert v.is_finite
    assert v.value == pytest.approx(1.0 / (p - 1), rel=1e-7)


@given(st.sampled_from(QUAD_CLOSED_FORMS[7:]))
def test_compactifying_substitution_preserves_value(case):
    # x = u/(1-u) maps (0,1) onto (0,inf); dx = du/(1-u)^2
    label, f, lo, hi, exact = case
    if lo != 0.0 or hi != math.inf:
        return

    def g(u):
        return f(u / (1.0 - u)) / (1.0 - u) ** 2

    v = integrate(g, 0.0, 1.0)
    assert v.is_finite and abs(v.value - exact) <= 1e-8

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stricttest.coeffspec import (
    Abs, Const, ConfigSyntaxError, DomainError, Pow, ValidationError, Var, evaluate,
    is_b_zero_ae, parse_expr, parse_problem, print_problem, probe_points, vectorize,
)

CEV = ("J=(0,inf); param mu0=1; param sigma0=2; param alpha=0.5; param beta=1.5; x0=1; "
       "mu=mu0*x^alpha; sigma=sigma0*x^beta; b=-(mu0/sigma0)*x^(alpha-beta)")
POWER_DRIFT = "J=(-inf,inf); x0=0; mu=abs(x)^2; sigma=1; b=x"

finite_x = st.floats(min_value=-50, max_value=50, allow_nan=False)
positive_x = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def test_cev_example_parses():
    spec = parse_problem(CEV)
    assert spec.interval == (0.0, math.inf)
    assert spec.params["beta"] == 1.5
    assert evaluate(spec.sigma, 4.0, spec.params) == pytest.approx(2 * 4.0 ** 1.5, rel=1e-15)


def test_power_drift_example_parses():
    spec = parse_problem(POWER_DRIFT)
    assert evaluate(spec.mu, -3.0) == 9.0
    assert evaluate(spec.b, 2.5) == 2.5


def test_start_outside_interval_is_rejected():
    with pytest.raises(ValidationError):
        parse_problem("J=(0,inf); x0=-1; mu=0; sigma=1")


def test_vanishing_sigma_is_rejected():
    with pytest.raises(ValidationError):
        parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=x-x")


def test_missing_key_is_reported():
    with pytest.raises(ValidationError, match="sigma"):
        parse_problem("J=(0,1); x0=0.5; mu=0")


@pytest.mark.parametrize("text, line", [
    ("J=(0,1)\nx0=0.5\nmu=0 +* 1\nsigma=1", 3),
    ("J=(0 1)\nx0=0.5", 1),
    ("J=(0,1); x0=0.5; mu=0; sigma=1\nfoo=3", 2),
    ("J=(0,1); x0=0.5; mu=0; sigma=1\nasym right mu = p=1", 2),
])
def test_syntax_errors_carry_the_line(text, line):
    with pytest.raises(ConfigSyntaxError) as info:
        parse_problem(text)
    assert info.value.line == line


def test_evaluate_examples():
    assert evaluate(Pow(Abs(Var()), Const(0.5)), 4.0) == 2.0
    with pytest.raises(DomainError):
        evaluate(parse_expr("x^(-1)"), 0.0)
    with pytest.raises(DomainError):
        evaluate(parse_expr("log(x)"), -1.0)


def test_b_zero_detection():
    assert is_b_zero_ae(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=0"))
    assert not is_b_zero_ae(parse_problem(POWER_DRIFT))
    assert is_b_zero_ae(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=x-x"))


def test_declared_nonzero_b_asymptotic_blocks_zero_verdict():
    spec = parse_problem("J=(0,inf); x0=1; mu=0; sigma=1; b=0\nasym right b = C=1 p=-3")
    assert not is_b_zero_ae(spec)


@given(st.sampled_from([CEV, POWER_DRIFT, "J=(0,1); x0=0.25; mu=1-2*x; sigma=sqrt(x*(1-x)); b=exp(-x)/x"]))
def test_print_parse_round_trip(text):
    spec = parse_problem(text)
    again = parse_problem(print_problem(spec))
    pts = probe_points(spec.interval)
    for name in ("mu", "sigma", "b"):
        a = vectorize(getattr(spec, name), spec.params)(pts)
        b = vectorize(getattr(again, name), again.params)(pts)
        np.testing.assert_allclose(b, a, rtol=1e-12, atol=0)


@given(finite_x)
def test_power_drift_coefficients_match_closed_form(x):
    spec = parse_problem(POWER_DRIFT)
    assert evaluate(spec.mu, x) == pytest.approx(x * x, rel=1e-12)


@given(positive_x, st.floats(min_value=-2, max_value=2), st.floats(min_value=-2, max_value=2))
def test_cev_coefficients_match_closed_form(x, alpha, beta):
    spec = parse_problem(CEV).with_params(alpha=alpha, beta=beta)
    want = -(1 / 2) * x ** (alpha - beta)
    assert evaluate(spec.b, x, spec.params) == pytest.approx(want, rel=1e-12)


@given(st.lists(positive_x, min_size=1, max_size=30))
def test_vectorized_matches_scalar(xs):
    spec = parse_problem(CEV)
    f = vectorize(spec.mu, spec.params)
    got = f(np.array(xs))
    want = [evaluate(spec.mu, v, spec.params) for v in xs]
    np.testing.assert_allclose(got, want, rtol=1e-13)


def test_unknown_parameter_override_is_rejected():
    with pytest.raises(ValidationError):
        parse_problem(CEV).with_params(gamma=1.0)


def test_probe_points_lie_inside_interval():
    for J in [(0.0, 1.0), (0.0, math.inf), (-math.inf, math.inf), (-3.0, -1.0)]:
        pts = probe_points(J)
        assert np.all(pts > J[0]) and np.all(pts < J[1])
        assert np.all(np.diff(pts) > 0)

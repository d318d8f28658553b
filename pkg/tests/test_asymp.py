import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from stricttest import asymp
from stricttest.asymp import (INF, ZERO, AsymptoticForm, Convergence, IncompatibleExponentials,
                              NotIntegrableAtLeadingOrder, decide_convergence)
from stricttest.coeffspec import RIGHT, parse_expr
from stricttest.derive import Frame, derive_form, derive_full
from stricttest.quad import probe_tail

exps = st.sampled_from([-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0])
logs = st.sampled_from([-1.0, 0.0, 1.0, 2.0])
consts = st.floats(min_value=0.1, max_value=10.0)


@st.composite
def power_forms(draw, frame=INF):
    return AsymptoticForm(draw(consts), 0.0, 0.0, draw(exps), draw(logs), frame)


@st.composite
def exp_forms(draw, frame=INF):
    a = draw(st.sampled_from([-2.0, -1.0, 1.0, 0.5]))
    return AsymptoticForm(draw(consts), a, 1.0, draw(exps), draw(logs), frame)


def same(f, g):
    return (math.isclose(f.C, g.C, rel_tol=1e-12) and (f.a, f.gamma, f.p, f.q, f.frame)
            == (g.a, g.gamma, g.p, g.q, g.frame))


def test_mul_examples():
    assert same(asymp.mul(AsymptoticForm(2, p=1), AsymptoticForm(3, p=-2)), AsymptoticForm(6, p=-1))
    got = asymp.mul(AsymptoticForm(1, -1, 1), AsymptoticForm(1, -1, 1, 2))
    assert same(got, AsymptoticForm(1, -2, 1, 2))
    assert asymp.mul(AsymptoticForm.zero(), AsymptoticForm(5, 1, 2, 3)).is_zero


def test_mul_rejects_ambiguous_exponentials():
    with pytest.raises(IncompatibleExponentials):
        asymp.mul(AsymptoticForm(1, 1, 2), AsymptoticForm(1, -1, 1))


def test_integrate_tail_examples():
    got = asymp.integrate_tail(AsymptoticForm(1, -2, 1))
    assert same(got, AsymptoticForm(0.5, -2, 1))
    got = asymp.integrate_tail(AsymptoticForm(1, p=-0.5, frame=ZERO))
    assert same(got, AsymptoticForm(2, p=0.5, frame=ZERO))
    with pytest.raises(NotIntegrableAtLeadingOrder):
        asymp.integrate_tail(AsymptoticForm(1, 1, 1))


def test_log_log_boundary_is_not_guessed():
    f = AsymptoticForm(1, p=-1, q=-1)
    assert decide_convergence(f) is Convergence.DIVERGES
    with pytest.raises(NotIntegrableAtLeadingOrder):
        asymp.partial_integral(f)


@pytest.mark.parametrize("form, verdict", [
    (AsymptoticForm(1, p=-2), Convergence.CONVERGES),
    (AsymptoticForm(1, p=-1), Convergence.DIVERGES),
    (AsymptoticForm(1, -1, 2, 7), Convergence.CONVERGES),
    (AsymptoticForm(1, p=-1, q=-2), Convergence.CONVERGES),
    (AsymptoticForm(1, p=-0.5, frame=ZERO), Convergence.CONVERGES),
    (AsymptoticForm(1, p=-1, frame=ZERO), Convergence.DIVERGES),
    (AsymptoticForm(1, p=-1, q=-2, frame=ZERO), Convergence.CONVERGES),
])
def test_decide_convergence_examples(form, verdict):
    assert decide_convergence(form) is verdict


def test_zero_form_normalises_fields():
    z = AsymptoticForm(0.0, 1.0, 2.0, 3.0, 4.0)
    assert (z.a, z.gamma, z.p, z.q) == (0.0, 0.0, 0.0, 0.0)


@given(power_forms(), power_forms())
def test_mul_commutes(f, g):
    assert same(asymp.mul(f, g), asymp.mul(g, f))


@given(exp_forms(), exp_forms(), exp_forms())
def test_mul_associates(f, g, h):
    assert same(asymp.mul(asymp.mul(f, g), h), asymp.mul(f, asymp.mul(g, h)))


@given(exp_forms())
def test_tail_then_derivative_recovers_exponents(f):
    assume(f.a < 0)
    d = asymp.differentiate(asymp.integrate_tail(f))
    assert (d.a, d.gamma, d.p, d.q) == (f.a, f.gamma, f.p, f.q)


@given(power_forms())
def test_tail_then_derivative_recovers_power(f):
    assume(f.p < -1)
    d = asymp.differentiate(asymp.integrate_tail(f))
    assert (d.p, d.q) == (f.p, f.q)


@given(power_forms(), st.floats(min_value=5.0, max_value=1e6))
def test_evaluate_matches_definition(f, u):
    want = f.C * u ** f.p * math.log(u) ** f.q
    assert f.evaluate(u) == pytest.approx(want, rel=1e-12)


def _battery():
    for frame in (INF, ZERO):
        for p, q, a in itertools.product(np.arange(-4.0, 4.5, 0.5), (0.0, 1.0, -1.0), (0.0, 1.0, -1.0)):
            for g in ((1.0, 2.0) if a else (0.0,)):
                yield AsymptoticForm(1.0, a, g if frame == INF else -g, p, q, frame)


def test_decisions_never_contradict_quadrature():
    contradictions = []
    for f in _battery():
        with np.errstate(all="ignore"):
            if f.frame == INF:
                v = probe_tail(f.evaluate, math.inf, "right", start=math.e)
            else:
                v = probe_tail(f.evaluate, 0.0, "left", start=1 / math.e)
        if v.is_conclusive and v.is_finite != asymp.converges(f):
            contradictions.append((f, v))
    assert contradictions == []


# ---------------------------------------------------------------- derived forms

def test_derive_power_of_cev_coefficient():
    f = derive_form(parse_expr("2*x^1.5"), Frame(RIGHT, math.inf), {})
    assert same(f, AsymptoticForm(2, p=1.5))


def test_derive_sum_keeps_dominant_term_and_remainder():
    d = derive_full(parse_expr("x^2 + 3*x"), Frame(RIGHT, math.inf), {})
    assert same(d.lead, AsymptoticForm(1, p=2))
    assert same(d.rem, AsymptoticForm(3, p=1))
    assert not d.sv


def test_derive_exact_expression_has_zero_remainder():
    d = derive_full(parse_expr("5*x^-1"), Frame(RIGHT, math.inf), {})
    assert d.rem.is_zero


def test_derive_resolves_cancellation_numerically():
    # 2x + 1: the constant is read off at a finite probe point, so it carries the 1/x correction
    f = derive_form(parse_expr("(x+1)^2 - x^2"), Frame(RIGHT, math.inf), {})
    assert f.p == 1.0 and f.C == pytest.approx(2.0, rel=1e-3)


def test_exp_of_growing_remainder_is_flagged():
    d = derive_full(parse_expr("exp(log(x) + sqrt(log(x)))"), Frame(RIGHT, math.inf), {})
    assert d.sv

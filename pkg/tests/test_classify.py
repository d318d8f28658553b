import pytest
from hypothesis import given, strategies as st

from stricttest.battery import battery, power_drift_expected, power_drift_spec
from stricttest.classify import (PreconditionError, Verdict, classify_martingale, classify_no_exit,
                                 endpoint_report, equivalence_checks)
from stricttest.coeffspec import LEFT, RIGHT, parse_problem
from stricttest.scale import AnalysisOptions
from stricttest.tri import Tri

BATTERY = battery()
NUMERIC = AnalysisOptions(use_asymptotics=False)


@pytest.mark.parametrize("entry", BATTERY, ids=[e.name for e in BATTERY])
def test_battery_verdicts(entry):
    assert classify_martingale(entry.spec).verdict is entry.expected


@pytest.mark.parametrize("entry", BATTERY, ids=[e.name for e in BATTERY])
def test_equivalent_conditions_agree(entry):
    for name, first, second in equivalence_checks(entry.spec):
        if first.known and second.known:
            assert first is second, name


@pytest.mark.slow
@pytest.mark.parametrize("entry", BATTERY, ids=[e.name for e in BATTERY])
def test_quadrature_route_reproduces_verdicts(entry):
    assert classify_martingale(entry.spec, NUMERIC).verdict is entry.expected


@given(st.one_of(st.floats(min_value=-1.0, max_value=0.9), st.floats(min_value=1.1, max_value=2.9),
                 st.floats(min_value=3.1, max_value=5.0)))
def test_power_drift_verdict_follows_alpha(alpha):
    assert classify_martingale(power_drift_spec(alpha)).verdict is power_drift_expected(alpha)


@pytest.mark.parametrize("entry", BATTERY[:14], ids=[e.name for e in BATTERY[:14]])
def test_ui_implies_martingale(entry):
    c = classify_martingale(entry.spec)
    if c.ui_martingale is Tri.YES:
        assert c.martingale_all_T is Tri.YES
    assert c.martingale_on(0.5) is c.martingale_all_T


def test_zero_b_fires_condition_A():
    c = classify_martingale(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=0"))
    assert "A" in c.triggered_conditions
    assert c.verdict is Verdict.UI


def test_strict_local_cites_failing_disjunct():
    c = classify_martingale(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=x^2"))
    conds = dict(c.conditions)
    assert conds["a"] is Tri.NO and conds["b"] is Tri.NO


def test_goodness_report_for_bm_with_constant_b():
    rep = endpoint_report(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=1"), RIGHT)
    assert rep.good is Tri.NO
    assert rep.y_exits is Tri.NO and rep.ytilde_exits is Tri.NO
    assert rep.s_limit_finite is Tri.NO and rep.stilde_limit_finite is Tri.YES


def test_no_exit_shortcut_agrees_with_full_classification():
    spec = parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=x^2")
    assert classify_no_exit(spec).martingale_all_T is classify_martingale(spec).martingale_all_T


def test_no_exit_shortcut_rejects_exiting_diffusion():
    with pytest.raises(PreconditionError):
        classify_no_exit(parse_problem("J=(0,inf); x0=1; mu=0; sigma=1; b=1"))


def test_borderline_exit_is_reported_unknown(configs_dir):
    from stricttest.coeffspec import load_problem
    c = classify_martingale(load_problem(configs_dir / "borderline_exit.cfg"))
    assert c.right.ytilde_exits is Tri.UNKNOWN
    assert c.verdict is Verdict.UNKNOWN
    assert c.left.endpoint == LEFT

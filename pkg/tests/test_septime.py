import math

import pytest
from hypothesis import given, strategies as st

from stricttest.battery import battery
from stricttest.classify import classify_martingale
from stricttest.coeffspec import Const, ValidationError, parse_problem
from stricttest.septime import (SdePair, arrangement_of_exponential, exponential_pair, hitting_bounds,
                                laws_identical, mutual_arrangement, separating_set)
from stricttest.tri import Tri

BATTERY = battery()


def pair(text):
    return SdePair.from_spec(parse_problem(text))


def test_identical_laws():
    a = mutual_arrangement(pair("J=(-inf,inf); x0=0; mu=0; sigma=1; mutilde=0; sigmatilde=1+0*x"))
    assert a.separating.identical
    assert a.equivalent is Tri.YES and a.singular is Tri.NO


def test_different_volatility_at_start_is_instantly_singular():
    a = mutual_arrangement(pair("J=(-inf,inf); x0=0; mu=0; sigma=1; mutilde=0; sigmatilde=2"))
    assert a.separating.x0_separating
    assert a.singular_at_0 is Tri.YES and a.tilde_loc_ac is Tri.NO


def test_bm_against_drifted_bm():
    a = mutual_arrangement(pair("J=(-inf,inf); x0=0; mu=0; sigma=1; mutilde=1; sigmatilde=1"))
    assert a.loc_equivalent is Tri.YES
    assert a.singular is Tri.YES
    assert a.tilde_ac is Tri.NO and a.ac is Tri.NO


def test_bm_against_bessel3():
    a = mutual_arrangement(pair("J=(0,inf); x0=1; mu=0; sigma=1; mutilde=1/x; sigmatilde=1"))
    assert a.tilde_loc_ac is Tri.YES and a.loc_ac is Tri.NO
    assert a.singular is Tri.YES
    assert a.separating.left_endpoint_separating is Tri.YES


def test_swapping_the_laws_swaps_one_sided_flags():
    p = pair("J=(0,inf); x0=1; mu=0; sigma=1; mutilde=1/x; sigmatilde=1")
    a, b = mutual_arrangement(p), mutual_arrangement(p.swapped())
    assert (a.tilde_loc_ac, a.loc_ac) == (b.loc_ac, b.tilde_loc_ac)
    assert a.singular is b.singular


def test_volatility_mismatch_around_start_separates_at_once():
    # x and x^2 agree only at x0 = 1, so x0 lies in the closure of the mismatch set
    sep = separating_set(pair("J=(0,inf); x0=1; mu=0; sigma=x; mutilde=0; sigmatilde=x^2"))
    assert sep.x0_separating


def test_non_integrable_drift_gap_pins_interior_point():
    spec = parse_problem("J=(0,inf); x0=1; mu=0; sigma=1; mutilde=abs(x-2.5)^-0.5; sigmatilde=1")
    sep = separating_set(SdePair.from_spec(spec))
    assert not sep.x0_separating
    assert len(sep.interior_separating) == 1
    lo, hi = sep.interior_separating[0]
    assert lo == pytest.approx(2.5, abs=1e-12) and hi == pytest.approx(2.5, abs=1e-12)
    assert hitting_bounds(sep, spec) == (0.0, hi)
    assert mutual_arrangement(SdePair.from_spec(spec)).tilde_ac is Tri.NO


def test_integrable_drift_gap_singularity_does_not_separate():
    sep = separating_set(pair("J=(0,inf); x0=1; mu=0; sigma=1; mutilde=abs(x-2.5)^-0.4; sigmatilde=1"))
    assert sep.interior_separating == ()


def test_pair_requires_second_law():
    with pytest.raises(ValidationError):
        pair("J=(0,1); x0=0.5; mu=0; sigma=1")


@given(st.floats(min_value=-2.0, max_value=2.0))
def test_constant_drift_pair_is_locally_equivalent(m):
    p = SdePair.build((-math.inf, math.inf), 0.0, Const(0.0), Const(1.0), Const(m), Const(1.0))
    a = mutual_arrangement(p)
    if m == 0.0:
        assert a.equivalent is Tri.YES
    else:
        assert a.loc_equivalent is Tri.YES and a.equivalent is Tri.NO


def test_exponential_pair_uses_b_sigma_gap():
    spec = parse_problem("J=(0,inf); x0=1; mu=0; sigma=x; b=2")
    p = exponential_pair(spec)
    assert not laws_identical(p)
    assert p.spec.params == spec.params


@pytest.mark.parametrize("entry", BATTERY, ids=[e.name for e in BATTERY])
def test_arrangement_bridges_to_classification(entry):
    a = arrangement_of_exponential(entry.spec)
    c = classify_martingale(entry.spec)
    assert a.tilde_loc_ac is c.martingale_all_T
    assert a.tilde_ac is c.ui_martingale

import math

import pytest
from hypothesis import given, strategies as st

from stricttest.bubbles import (CEV_CONFIG, RegionLabel, VolModel, cev_vol_model, bubble_classify,
                                cev_region, cev_spec, driftless_dichotomy, region_of)
from stricttest.classify import Verdict, classify_martingale
from stricttest.coeffspec import ValidationError, parse_problem, probe_points, vectorize
from stricttest.tri import Tri

grid = st.integers(min_value=0, max_value=20).map(lambda k: round(-1.0 + 0.2 * k, 10))


@given(grid, grid)
def test_config_template_matches_builder(alpha, beta):
    a = cev_spec(alpha, beta, mu0=0.5, sigma0=3.0)
    b = parse_problem(CEV_CONFIG.format(alpha=alpha, beta=beta, mu0=0.5, sigma0=3.0))
    pts = probe_points(a.interval)
    for name in ("mu", "sigma", "b"):
        x = vectorize(getattr(a, name), a.params)(pts)
        y = vectorize(getattr(b, name), b.params)(pts)
        assert x == pytest.approx(y, rel=1e-12)


@given(grid, grid)
def test_cev_classification_matches_region(alpha, beta):
    v = classify_martingale(cev_spec(alpha, beta)).verdict
    assert region_of(v) is cev_region(alpha, beta)


@pytest.mark.parametrize("alpha, beta, label", [
    (0.0, 0.0, RegionLabel.UI),
    (1.0, 1.0, RegionLabel.MARTINGALE_NOT_UI),
    (0.0, 0.5, RegionLabel.STRICT_LOCAL),
    (2.6, 1.8, RegionLabel.MARTINGALE_NOT_UI),
    (0.6, 0.8, RegionLabel.STRICT_LOCAL),
])
def test_cev_region_examples(alpha, beta, label):
    assert cev_region(alpha, beta) is label


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("mu0", [0.0, 0.05])
def test_cev_vol_grid(alpha, mu0):
    b = bubble_classify(cev_vol_model(alpha, mu0))
    assert b.classification.martingale_all_T is Tri.of(alpha <= 1.0)
    assert b.classification.ui_martingale is Tri.of(alpha < 1.0 and mu0 > 0.0)


@pytest.mark.parametrize("alpha, label", [(0.5, "type 2 bubble"), (1.0, "type 2 bubble"),
                                          (1.25, "type 3 bubble"), (2.0, "type 3 bubble"),
                                          (3.0, "type 3 bubble")])
def test_driftless_dichotomy_agrees_with_pipeline(alpha, label):
    m = cev_vol_model(alpha, 0.0)
    assert bubble_classify(m).label == label
    assert driftless_dichotomy(m.sigma, m.x0, m.params).label == label


def test_dichotomy_on_quadrature_route():
    from stricttest.scale import AnalysisOptions
    m = cev_vol_model(1.5, 0.0)
    d = driftless_dichotomy(m.sigma, m.x0, m.params, options=AnalysisOptions(use_asymptotics=False))
    assert d.type3 is Tri.YES
    assert d.evidence[0][1].route == "numeric"


def test_model_round_trips_through_spec():
    m = cev_vol_model(1.5, 0.05, sigma0=2.0, x0=3.0)
    again = VolModel.from_spec(m.to_spec())
    assert again.mu0 == 0.05 and again.x0 == 3.0
    assert again.params == m.params


def test_model_requires_half_line():
    with pytest.raises(ValidationError):
        VolModel.from_spec(parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1"))
    with pytest.raises(ValidationError):
        cev_vol_model(1.0, 0.0, x0=-1.0)


def test_cev_vol_config_file(configs_dir):
    from stricttest.coeffspec import load_problem
    m = VolModel.from_spec(load_problem(configs_dir / "cev_vol.cfg"))
    assert bubble_classify(m).label == "type 3 bubble"
    assert math.isclose(m.mu0, 0.05)


def test_region_of_unknown_is_none():
    assert region_of(Verdict.UNKNOWN) is None

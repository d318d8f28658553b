import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stricttest.battery import power_drift_spec
from stricttest.coeffspec import LEFT, RIGHT, parse_problem
from stricttest.mcsim import (AUX, AUX_COLUMNS, BOTH, DIRECT, DIRECT_COLUMNS, SimConfig, SimulationError,
                              dual_agreement, killing_sides, occupation_check, simulate, simulate_EZ,
                              simulate_survival, truncation_level, write_csv, zero_at_absorption)

SMALL = SimConfig(paths=2000, step=1e-2, block=512)


def test_zero_b_gives_exactly_one():
    spec = parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=0")
    r = simulate_EZ(spec, SMALL)
    assert r.estimate == 1.0 and r.se == 0.0


def test_same_seed_is_bit_identical():
    spec = power_drift_spec(2.0)
    a = simulate_EZ(spec, SMALL)
    b = simulate_EZ(spec, SMALL)
    assert a.estimate == b.estimate and a.se == b.se


def test_thread_count_does_not_change_result():
    spec = power_drift_spec(1.0)
    one = simulate(spec, SimConfig(paths=3000, step=1e-2, block=500, threads=1, estimator=BOTH))
    many = simulate(spec, SimConfig(paths=3000, step=1e-2, block=500, threads=4, estimator=BOTH))
    assert [(r.estimate, r.se) for r in one] == [(r.estimate, r.se) for r in many]


def test_different_seeds_differ():
    spec = power_drift_spec(1.0)
    assert simulate_EZ(spec, SMALL).estimate != simulate_EZ(spec, SimConfig(paths=2000, step=1e-2, seed=7)).estimate


@settings(max_examples=8)
@given(st.sampled_from([-0.5, 0.5, 1.0, 2.0, 3.5]))
def test_supermartingale_bound(alpha):
    r = simulate_EZ(power_drift_spec(alpha), SMALL)
    assert 0.0 <= r.estimate <= 1.0 + 5.0 * r.se


def test_absorption_rules_for_explosive_drift():
    spec = power_drift_spec(2.0)
    assert zero_at_absorption(spec) == {LEFT: False, RIGHT: True}
    assert killing_sides(spec) == {LEFT: False, RIGHT: True}


def test_good_endpoint_survives():
    # alpha = 4: the auxiliary process exits at +inf, but that endpoint is good
    assert killing_sides(power_drift_spec(4.0))[RIGHT] is False
    assert simulate_survival(power_drift_spec(4.0), SMALL).estimate == 1.0


def test_dual_estimators_agree_on_strict_local_case():
    spec = power_drift_spec(2.0)
    cfg = SimConfig(paths=20_000, step=1e-3, estimator=BOTH)
    direct, aux = simulate(spec, cfg)
    assert aux.estimate < 1.0
    assert dual_agreement(direct, aux)


def test_csv_schemas(tmp_path):
    spec = power_drift_spec(2.0)
    for est, cols in ((DIRECT, DIRECT_COLUMNS), (AUX, AUX_COLUMNS)):
        (r,) = simulate(spec, SimConfig(paths=50, step=1e-2, estimator=est), keep_rows=True)
        path = tmp_path / f"{est}.csv"
        write_csv(r, str(path))
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == cols
        assert len(rows) == 51


def test_occupation_identity_with_unit_density():
    spec = parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=1")
    rep = occupation_check(spec, SimConfig(paths=200, step=1e-3))
    assert rep.median == pytest.approx(0.0, abs=1e-12)


def test_occupation_discrepancy_shrinks_with_step():
    spec = parse_problem("J=(-inf,inf); x0=0; mu=0; sigma=1; b=x")
    coarse = occupation_check(spec, SimConfig(paths=300, step=1e-3))
    fine = occupation_check(spec, SimConfig(paths=300, step=2.5e-4))
    assert fine.median < coarse.median


def test_absorbed_paths_are_excluded_from_occupation_median():
    spec = parse_problem("J=(0,inf); x0=0.05; mu=0; sigma=1; b=x")
    rep = occupation_check(spec, SimConfig(paths=300, step=1e-3))
    assert rep.excluded > 0 and rep.used + rep.excluded == 300


@pytest.mark.parametrize("kwargs", [dict(step=2.0), dict(paths=0), dict(quantile=1.0),
                                    dict(estimator="other"), dict(seed=-1)])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


def test_truncation_levels_must_bracket_start():
    with pytest.raises(ValueError):
        SimConfig(lower=2.0).levels(power_drift_spec(1.0))


def test_undetermined_absorption_rule_is_refused(configs_dir):
    from stricttest.coeffspec import load_problem
    with pytest.raises(SimulationError):
        simulate_survival(load_problem(configs_dir / "borderline_exit.cfg"), SMALL)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=0.5, max_value=0.9999))
def test_truncation_level_lies_between_start_and_endpoint(x0, q):
    hi = truncation_level(math.inf, x0, q)
    lo = truncation_level(-math.inf, x0, q)
    assert lo < x0 < hi
    assert np.isfinite(hi) and np.isfinite(lo)

"""Regression battery: worked examples plus synthetic power-law and exponential specs.

Each entry carries the verdict it must produce when that verdict is known in
closed form; `expected=None` marks specs that only feed consistency checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bubbles import cev_spec, cev_vol_model
from .classify import Verdict
from .coeffspec import ProblemSpec, parse_problem

POWER_DRIFT_ALPHAS = (-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 4.0)

POWER_DRIFT_TEXT = """\
interval = (-inf, inf)
param alpha = 2
x0 = 0
mu = abs(x)^alpha
sigma = 1
b = x
"""


def power_drift_expected(alpha: float) -> Verdict:
    if alpha <= 1.0:
        return Verdict.MARTINGALE_NOT_UI
    return Verdict.STRICT_LOCAL if alpha <= 3.0 else Verdict.UI


def power_drift_spec(alpha: float) -> ProblemSpec:
    return parse_problem(POWER_DRIFT_TEXT).with_params(alpha=alpha)


@dataclass(frozen=True)
class BatteryEntry:
    name: str
    spec: ProblemSpec
    expected: Verdict | None = None


_SYNTHETIC = [
    ("bm_const_b", "interval=(-inf,inf); x0=0; mu=0; sigma=1; b=1", Verdict.MARTINGALE_NOT_UI),
    ("zero_b", "interval=(-inf,inf); x0=0; mu=0; sigma=1; b=0", Verdict.UI),
    ("ou_const_b", "interval=(-inf,inf); x0=0; mu=-x; sigma=1; b=1", Verdict.MARTINGALE_NOT_UI),
    ("gbm", "interval=(0,inf); x0=1; mu=0; sigma=x; b=1", Verdict.MARTINGALE_NOT_UI),
    ("bm_absorbed_at_0", "interval=(0,inf); x0=1; mu=0; sigma=1; b=1", Verdict.MARTINGALE_NOT_UI),
    ("bm_b_square", "interval=(-inf,inf); x0=0; mu=0; sigma=1; b=x^2", Verdict.STRICT_LOCAL),
    ("bm_b_neg_square", "interval=(-inf,inf); x0=0; mu=0; sigma=1; b=-x^2", Verdict.STRICT_LOCAL),
    ("bm_b_exp", "interval=(-inf,inf); x0=0; mu=0; sigma=1; b=exp(x)", Verdict.STRICT_LOCAL),
    ("bm_b_linear", "interval=(-inf,inf); x0=0; mu=0; sigma=1; b=x", Verdict.MARTINGALE_NOT_UI),
    ("quadratic_vol", "interval=(-inf,inf); x0=0; mu=0; sigma=1+x^2; b=1", Verdict.MARTINGALE_NOT_UI),
    ("bessel3_inverse", "interval=(0,inf); x0=1; mu=1/x; sigma=1; b=-1/x", Verdict.STRICT_LOCAL),
    ("unit_interval", "interval=(0,1); x0=0.5; mu=0; sigma=x*(1-x); b=1", Verdict.MARTINGALE_NOT_UI),
]


def battery() -> list[BatteryEntry]:
    """At least twenty specs spanning every verdict."""
    out = [BatteryEntry(f"power_drift[alpha={a:g}]", power_drift_spec(a), power_drift_expected(a)) for a in POWER_DRIFT_ALPHAS]
    for a, b, v in ((0.0, 0.0, Verdict.UI), (1.0, 1.0, Verdict.MARTINGALE_NOT_UI),
                    (0.0, 0.75, Verdict.STRICT_LOCAL), (2.0, 1.25, Verdict.UI),
                    (0.5, 2.0, Verdict.MARTINGALE_NOT_UI)):
        out.append(BatteryEntry(f"cev[alpha={a:g},beta={b:g}]", cev_spec(a, b), v))
    for a, m, v in ((0.5, 0.05, Verdict.UI), (2.0, 0.05, Verdict.STRICT_LOCAL),
                    (1.0, 0.0, Verdict.MARTINGALE_NOT_UI), (3.0, 0.0, Verdict.STRICT_LOCAL)):
        out.append(BatteryEntry(f"cev_vol[alpha={a:g},mu0={m:g}]", cev_vol_model(a, m).to_spec(), v))
    out += [BatteryEntry(n, parse_problem(t), v) for n, t, v in _SYNTHETIC]
    return out


# ---------------------------------------------------------------- quadrature oracle

INF = math.inf

# (label, integrand, lower, upper, exact value)
QUAD_CLOSED_FORMS = [
    ("x^-1/2 on (0,1)", lambda x: x ** -0.5, 0.0, 1.0, 2.0),
    ("x^-0.9 on (0,1)", lambda x: x ** -0.9, 0.0, 1.0, 10.0),
    ("sqrt(x) on (0,1)", np.sqrt, 0.0, 1.0, 2.0 / 3.0),
    ("log x on (0,1)", np.log, 0.0, 1.0, -1.0),
    ("-log(x)/sqrt(x) on (0,1)", lambda x: -np.log(x) / np.sqrt(x), 0.0, 1.0, 4.0),
    ("1/sqrt(1-x^2) on (0,1)", lambda x: 1.0 / np.sqrt(1.0 - x * x), 0.0, 1.0, math.pi / 2),
    ("sin x on (0,pi)", np.sin, 0.0, math.pi, 2.0),
    ("exp(-x) on (1,inf)", lambda x: np.exp(-x), 1.0, INF, math.exp(-1.0)),
    ("exp(-x) on (0,inf)", lambda x: np.exp(-x), 0.0, INF, 1.0),
    ("x exp(-x) on (0,inf)", lambda x: x * np.exp(-x), 0.0, INF, 1.0),
    ("x^2 exp(-x) on (0,inf)", lambda x: x * x * np.exp(-x), 0.0, INF, 2.0),
    ("exp(-x)/sqrt(x) on (0,inf)", lambda x: np.exp(-x) / np.sqrt(x), 0.0, INF, math.sqrt(math.pi)),
    ("x^-2 on (1,inf)", lambda x: x ** -2.0, 1.0, INF, 1.0),
    ("(1+x)^-2 on (0,inf)", lambda x: (1.0 + x) ** -2.0, 0.0, INF, 1.0),
    ("1/(1+x^2) on (0,inf)", lambda x: 1.0 / (1.0 + x * x), 0.0, INF, math.pi / 2),
    ("1/(1+x^2) on R", lambda x: 1.0 / (1.0 + x * x), -INF, INF, math.pi),
    ("exp(-x^2) on R", lambda x: np.exp(-x * x), -INF, INF, math.sqrt(math.pi)),
    ("1/cosh x on (0,inf)", lambda x: 1.0 / np.cosh(x), 0.0, INF, math.pi / 2),
    ("log(x)/x^2 on (1,inf)", lambda x: np.log(x) / (x * x), 1.0, INF, 1.0),
    ("x^-1/2/(1+x) on (0,inf)", lambda x: 1.0 / (np.sqrt(x) * (1.0 + x)), 0.0, INF, math.pi),
]

# (label, integrand, endpoint, side, start)
DIVERGENT_CANARIES = [
    ("1/x toward 0+", lambda x: 1.0 / x, 0.0, "left", 1.0),
    ("1/x toward +inf", lambda x: 1.0 / x, INF, "right", 1.0),
    ("1/(x log x) toward +inf", lambda x: 1.0 / (x * np.log(x)), INF, "right", math.e),
]

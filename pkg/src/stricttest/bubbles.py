"""Bubble typing for local-volatility price models and the CEV case study.

A discounted price X = exp(-mu0 t) Y of dY = mu0 Y dt + sigma(Y) dW on (0, inf)
is x0 times the stochastic exponential of int b(Y) dW with b(x) = sigma(x)/x,
so the bubble type is the martingale classification of that exponential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from . import asymp
from .asymp import AsymptoticError
from .classify import Classification, Verdict, classify_martingale
from .coeffspec import (RIGHT, AsymDecl, Const, Div, Expr, Mul, Neg, Param, Pow, ProblemSpec,
                        Var, ValidationError, constant_value, vectorize)
from .derive import derive_form, Frame
from .quad import IntegralVerdict, probe_tail
from .scale import DEFAULT_OPTIONS, AnalysisOptions
from .tri import Tri, all_, from_verdict

X = Var()
REGION_TOL = 1e-9


@dataclass(frozen=True)
class VolModel:
    """Price model on (0, inf) with volatility sigma(x) and risk-free rate mu0."""

    sigma: Expr
    mu0: float = 0.0
    x0: float = 1.0
    params: Mapping[str, float] = field(default_factory=dict)
    sigma_asymptotics: Mapping[str, AsymDecl] = field(default_factory=dict)

    def __post_init__(self):
        if not self.x0 > 0:
            raise ValidationError("the initial price must be positive")

    @classmethod
    def from_spec(cls, spec: ProblemSpec) -> "VolModel":
        if spec.interval != (0.0, math.inf):
            raise ValidationError("a volatility model lives on J = (0, inf)")
        mu0 = 0.0 if spec.rate is None else constant_value(spec.rate, spec.params)
        asym = {side: d for (side, name), d in spec.asymptotics.items() if name == "sigma"}
        return cls(spec.sigma, mu0, spec.x0, dict(spec.params), asym)

    def to_spec(self) -> ProblemSpec:
        asym = {(side, "sigma"): d for side, d in self.sigma_asymptotics.items()}
        spec = ProblemSpec((0.0, math.inf), Const(float(self.x0)), Mul(Const(float(self.mu0)), X),
                           self.sigma, b=Div(self.sigma, X), params=dict(self.params),
                           asymptotics=asym, rate=Const(float(self.mu0)))
        return spec.validate()


@dataclass(frozen=True)
class BubbleReport:
    type3: Tri
    type2: Tri
    none: Tri
    classification: Classification | None = None
    evidence: tuple = ()

    @property
    def label(self) -> str:
        if self.type3 is Tri.YES:
            return "type 3 bubble"
        if self.type2 is Tri.YES:
            return "type 2 bubble"
        if self.none is Tri.YES:
            return "no bubble"
        return "undetermined"


def _report(mart: Tri, ui: Tri, cls: Classification | None = None, evidence=()) -> BubbleReport:
    return BubbleReport(~mart, all_(mart, ~ui), all_(mart, ui), cls, tuple(evidence))


def bubble_classify(model: VolModel, options: AnalysisOptions = DEFAULT_OPTIONS) -> BubbleReport:
    cls = classify_martingale(model.to_spec(), options)
    return _report(cls.martingale_all_T, cls.ui_martingale, cls)


def tail_weight(sigma: Expr) -> Expr:
    return Div(X, Pow(sigma, Const(2.0)))


def driftless_dichotomy(sigma: Expr, x0: float = 1.0, params: Mapping[str, float] | None = None,
                        sigma_right: AsymDecl | None = None,
                        options: AnalysisOptions = DEFAULT_OPTIONS) -> BubbleReport:
    """Zero-rate case: x/sigma^2 integrable at infinity decides strict locality.

    Integrable gives a strict local martingale on every horizon (type 3),
    otherwise a martingale that is not uniformly integrable (type 2).
    """
    params = dict(params or {})
    w = tail_weight(sigma)
    verdict = None
    if options.use_asymptotics:
        overrides = {}
        if sigma_right is not None:
            C, a, g, p, q = sigma_right.values(params)
            overrides[sigma] = asymp.AsymptoticForm(C, a, g, p, q, asymp.INF)
        try:
            f = derive_form(w, Frame(RIGHT, math.inf), params, overrides)
            kind = asymp.converges(f)
            verdict = (IntegralVerdict.finite(route="asymptotic", note=f"x/sigma^2 ~ {f}") if kind
                       else IntegralVerdict.divergent(route="asymptotic", note=f"x/sigma^2 ~ {f}"))
        except (AsymptoticError, ZeroDivisionError, ValueError):
            verdict = None
    if verdict is None:
        verdict = probe_tail(vectorize(w, params), math.inf, "right", start=max(x0, 1.0),
                             tol=options.tol, depth=options.depth)
    # never uniformly integrable without drift
    return _report(~from_verdict(verdict), Tri.NO, evidence=[("x/sigma^2 at inf", verdict)])


# ---------------------------------------------------------------- CEV

class RegionLabel(Enum):
    UI = Verdict.UI.value
    STRICT_LOCAL = Verdict.STRICT_LOCAL.value
    MARTINGALE_NOT_UI = Verdict.MARTINGALE_NOT_UI.value

    def __str__(self) -> str:
        return self.value


def cev_region(alpha: float, beta: float, tol: float = REGION_TOL) -> RegionLabel:
    """Closed-form region of the generalised CEV exponential in the (alpha, beta) plane.

    Comparisons carry a small tolerance so that grid values such as
    2*1.4 - 1.8 land on the boundary line they represent.
    """
    if 2.0 * beta - alpha < 1.0 - tol:
        return RegionLabel.UI
    return RegionLabel.STRICT_LOCAL if beta < 1.0 - tol else RegionLabel.MARTINGALE_NOT_UI


CEV_CONFIG = """\
interval = (0, inf)
param alpha = {alpha!r}
param beta = {beta!r}
param mu0 = {mu0!r}
param sigma0 = {sigma0!r}
x0 = 1
mu = mu0*x^alpha
sigma = sigma0*x^beta
b = -(mu0/sigma0)*x^(alpha-beta)
"""


def cev_spec(alpha: float, beta: float, mu0: float = 1.0, sigma0: float = 1.0) -> ProblemSpec:
    """The generalised CEV exponential: drift mu0 x^alpha, volatility sigma0 x^beta."""
    p = {"alpha": float(alpha), "beta": float(beta), "mu0": float(mu0), "sigma0": float(sigma0)}
    mu = Mul(Param("mu0"), Pow(X, Param("alpha")))
    sg = Mul(Param("sigma0"), Pow(X, Param("beta")))
    b = Mul(Neg(Div(Param("mu0"), Param("sigma0"))), Pow(X, Param("alpha") - Param("beta")))
    return ProblemSpec((0.0, math.inf), Const(1.0), mu, sg, b, params=p,
                       param_order=("alpha", "beta", "mu0", "sigma0")).validate()


def cev_vol_model(alpha: float, mu0: float, sigma0: float = 1.0, x0: float = 1.0) -> VolModel:
    """Local-volatility CEV price: sigma(x) = sigma0 x^alpha."""
    sg = Mul(Param("sigma0"), Pow(X, Param("alpha")))
    return VolModel(sg, float(mu0), float(x0), {"alpha": float(alpha), "sigma0": float(sigma0)})


def region_of(verdict: Verdict) -> RegionLabel | None:
    try:
        return RegionLabel(verdict.value)
    except ValueError:
        return None

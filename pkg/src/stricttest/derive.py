"""Leading-order endpoint forms of coefficient expressions.

Each node of an expression tree is mapped to an AsymptoticForm in the local
variable u of an endpoint: u = x (right, infinite), u = -x (left, infinite),
u = r - x or u = x - l (finite).  Sums whose leading terms cancel are resolved
by sampling the subexpression close to the endpoint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import asymp
from .asymp import INF, ZERO, AsymptoticError, AsymptoticForm, Cancellation
from .coeffspec import (LEFT, RIGHT, Abs, Add, Const, Div, Exp, Expr, Log, Mul, Neg,
                        Param, Pow, ProblemSpec, Sub, Var, constant_value, vectorize)

ZERO_TOL = 1e-9
SLOPE_TOL = 1e-3
SNAP_TOL = 1e-4


@dataclass(frozen=True)
class Frame:
    side: str
    endpoint: float

    @property
    def kind(self) -> str:
        return INF if math.isinf(self.endpoint) else ZERO

    def x_of_u(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == INF:
            return u if self.side == RIGHT else -u
        return self.endpoint - u if self.side == RIGHT else self.endpoint + u

    def x_form(self) -> AsymptoticForm:
        if self.kind == INF:
            return AsymptoticForm(1.0 if self.side == RIGHT else -1.0, p=1.0, frame=INF)
        if self.endpoint != 0.0:
            return AsymptoticForm.const(self.endpoint, ZERO)
        return AsymptoticForm(-1.0 if self.side == RIGHT else 1.0, p=1.0, frame=ZERO)

    def samples(self) -> np.ndarray:
        if self.kind == INF:
            return 10.0 ** np.array([3.0, 3.5, 4.0, 4.5, 5.0])
        scale = max(1.0, abs(self.endpoint))
        return scale * 10.0 ** np.array([-5.0, -5.5, -6.0, -6.5, -7.0])


def frame_for(spec: ProblemSpec, side: str) -> Frame:
    return Frame(side, spec.l if side == LEFT else spec.r)


def declared_form(spec: ProblemSpec, side: str, name: str) -> AsymptoticForm | None:
    decl = spec.declared(side, name)
    if decl is None:
        return None
    C, a, g, p, q = decl.values(spec.params)
    return AsymptoticForm(C, a, g, p, q, frame_for(spec, side).kind)


def declared_overrides(spec: ProblemSpec, side: str) -> dict:
    out = {}
    for name in ("mu", "sigma", "b", "mutilde", "sigmatilde"):
        f = declared_form(spec, side, name)
        e = spec.coefficient(name)
        if f is not None and e is not None:
            out[e] = f
    return out


def _simple_rational(v: float) -> float | None:
    fr = Fraction(v).limit_denominator(12)
    return float(fr) if abs(float(fr) - v) <= SNAP_TOL else None


def resolve_numeric(e: Expr, frame: Frame, params: Mapping[str, float],
                    parts: tuple[Expr, ...] = ()) -> AsymptoticForm:
    """Fit C*u^p to samples of e near the endpoint, or detect an exact zero."""
    u = frame.samples()
    x = frame.x_of_u(u)
    with np.errstate(all="ignore"):
        v = vectorize(e, params)(x)
        mag = sum(np.abs(vectorize(t, params)(x)) for t in parts) if parts else np.abs(v)
    if not np.all(np.isfinite(v)):
        raise AsymptoticError(f"{e} is not finite near the endpoint")
    if np.all(np.abs(v) <= ZERO_TOL * mag):
        return AsymptoticForm.zero(frame.kind)
    if np.any(v == 0.0) or not (np.all(v > 0) or np.all(v < 0)):
        raise AsymptoticError(f"cannot resolve leading order of {e}")
    slopes = np.diff(np.log(np.abs(v))) / np.diff(np.log(u))
    if abs(slopes[-1] - slopes[-2]) > SLOPE_TOL:
        raise AsymptoticError(f"leading order of {e} is not a pure power")
    p = _simple_rational(slopes[-1])
    if p is None:
        raise AsymptoticError(f"leading exponent of {e} is not a simple rational")
    return AsymptoticForm(float(v[-1] / u[-1] ** p), p=p, frame=frame.kind)


@dataclass(frozen=True)
class Derived:
    """Leading form plus what was dropped to get it.

    `rem` bounds the dropped additive part (zero form when nothing was
    dropped, None when the bound is unknown).  `sv` records that a
    non-constant multiplicative factor may have been dropped; such factors
    only matter for forms on the borderline u^-1 of integrability.
    """

    lead: AsymptoticForm
    rem: AsymptoticForm | None
    sv: bool = False


def _largest(*forms):
    out = None
    for f in forms:
        if f is None:
            return None
        if out is None or asymp.compare(f, out) > 0:
            out = f
    return out


def _safe(op, *args):
    if any(a is None for a in args):
        return None
    try:
        return op(*args)
    except (AsymptoticError, ZeroDivisionError, ValueError):
        return None


def _rem_mul(r, f):
    return _safe(asymp.mul, r, f)


class _Deriver:
    def __init__(self, frame: Frame, params: Mapping[str, float], overrides: Mapping[Expr, AsymptoticForm]):
        self.frame = frame
        self.params = params
        self.overrides = overrides

    def __call__(self, e: Expr) -> AsymptoticForm:
        return self.full(e).lead

    def _zero(self) -> AsymptoticForm:
        return AsymptoticForm.zero(self.frame.kind)

    def full(self, e: Expr) -> Derived:
        if e in self.overrides:
            return Derived(self.overrides[e], None)
        k = self.frame.kind
        Z = self._zero()
        if isinstance(e, Const):
            return Derived(AsymptoticForm.const(e.value, k), Z)
        if isinstance(e, Param):
            return Derived(AsymptoticForm.const(float(self.params[e.name]), k), Z)
        if isinstance(e, Var):
            f = self.frame.x_form()
            if k == ZERO and self.frame.endpoint != 0.0:
                return Derived(f, AsymptoticForm(1.0, p=1.0, frame=ZERO))
            return Derived(f, Z)
        if isinstance(e, Neg):
            d = self.full(e.arg)
            return Derived(asymp.neg(d.lead), d.rem, d.sv)
        if isinstance(e, (Add, Sub)):
            return self._sum(e)
        if isinstance(e, Mul):
            dl, dr = self.full(e.left), self.full(e.right)
            lead = asymp.mul(dl.lead, dr.lead)
            rem = _largest(_rem_mul(dl.rem, dr.lead), _rem_mul(dr.rem, dl.lead))
            return Derived(lead, rem, dl.sv or dr.sv)
        if isinstance(e, Div):
            dn, dd = self.full(e.left), self.full(e.right)
            if dd.lead.is_zero:
                raise AsymptoticError(f"denominator of {e} vanishes near the endpoint")
            inv = asymp.reciprocal(dd.lead)
            lead = asymp.mul(dn.lead, inv)
            rem = _largest(_rem_mul(dn.rem, inv), _rem_mul(_rem_mul(dd.rem, lead), inv))
            return Derived(lead, rem, dn.sv or dd.sv)
        if isinstance(e, Pow):
            kexp = constant_value(e.exponent, self.params)
            d = self.full(e.base)
            if d.lead.is_zero and kexp <= 0:
                raise AsymptoticError(f"{e}: zero base with non-positive exponent")
            lead = asymp.power(d.lead, kexp)
            if d.lead.is_zero:
                return Derived(lead, None, d.sv)
            rem = _rem_mul(d.rem, _safe(asymp.power, d.lead, kexp - 1.0))
            return Derived(lead, rem, d.sv)
        if isinstance(e, Abs):
            d = self.full(e.arg)
            f = d.lead
            return Derived(AsymptoticForm(abs(f.C), f.a, f.gamma, f.p, f.q, f.frame), d.rem, d.sv)
        if isinstance(e, Exp):
            return self._exp(e)
        if isinstance(e, Log):
            return self._log(e)
        raise TypeError(f"unknown node {e!r}")

    def _sum(self, e) -> Derived:
        df, dg = self.full(e.left), self.full(e.right)
        g = asymp.neg(dg.lead) if isinstance(e, Sub) else dg.lead
        f = df.lead
        sv = df.sv or dg.sv
        if f.is_zero:
            return Derived(g, _largest(df.rem, dg.rem), sv)
        if g.is_zero:
            return Derived(f, _largest(df.rem, dg.rem), sv)
        try:
            lead = asymp.add(f, g)
        except Cancellation:
            return Derived(resolve_numeric(e, self.frame, self.params, (e.left, e.right)), None, sv)
        c = asymp.compare(f, g)
        dropped = g if c > 0 else f if c < 0 else self._zero()
        return Derived(lead, _largest(df.rem, dg.rem, dropped), sv)

    def _exp(self, e: Exp) -> Derived:
        d = self.full(e.arg)
        A, rA = d.lead, d.rem
        k = self.frame.kind
        if A.tends_to_zero():
            return Derived(AsymptoticForm.const(1.0, k), _largest(A, rA), d.sv)
        if A.is_constant:
            lead = AsymptoticForm.const(math.exp(A.C), k)
            return Derived(lead, _rem_mul(rA, lead), d.sv)
        if A.a == 0.0 and A.q == 0.0:
            lead = AsymptoticForm(1.0, A.C, A.p, 0.0, 0.0, k)
        elif A.a == 0.0 and A.p == 0.0 and A.q == 1.0:
            # exp(C*log u) or exp(C*log(1/u))
            lead = AsymptoticForm(1.0, p=A.C if k == INF else -A.C, frame=k)
        else:
            raise AsymptoticError(f"{e}: exponent {A} outside the single-term algebra")
        if rA is not None and rA.is_zero:
            return Derived(lead, rA, d.sv)
        if rA is not None and rA.tends_to_zero():
            return Derived(lead, _rem_mul(rA, lead), d.sv)
        # exp of a growing remainder is a non-constant factor
        return Derived(lead, None, True)

    def _log(self, e: Log) -> Derived:
        d = self.full(e.arg)
        A = d.lead
        k = self.frame.kind
        if A.C <= 0:
            raise AsymptoticError(f"{e}: argument is not positive near the endpoint")
        rel = _rem_mul(d.rem, _safe(asymp.reciprocal, A))
        const = AsymptoticForm.const(math.log(A.C), k) if A.C != 1.0 else self._zero()
        if A.a:
            extra = [const]
            if A.p:
                extra.append(AsymptoticForm(A.p if k == INF else -A.p, q=1.0, frame=k))
            rem = None if A.q else _largest(rel, *extra)
            return Derived(AsymptoticForm(A.a, p=A.gamma, frame=k), rem, d.sv)
        if A.p:
            rem = None if A.q else _largest(rel, const)
            return Derived(AsymptoticForm(A.p if k == INF else -A.p, q=1.0, frame=k), rem, d.sv)
        if A.q:
            raise AsymptoticError(f"{e}: iterated logarithm")
        if abs(A.C - 1.0) > asymp.EPS:
            return Derived(AsymptoticForm.const(math.log(A.C), k), rel, d.sv)
        return Derived(resolve_numeric(e, self.frame, self.params), None, d.sv)


def derive_form(e: Expr, frame: Frame, params: Mapping[str, float],
                overrides: Mapping[Expr, AsymptoticForm] | None = None) -> AsymptoticForm:
    """Leading-order form of e toward the frame's endpoint (original orientation)."""
    return _Deriver(frame, params, overrides or {})(e)


def derive_full(e: Expr, frame: Frame, params: Mapping[str, float],
                overrides: Mapping[Expr, AsymptoticForm] | None = None) -> Derived:
    return _Deriver(frame, params, overrides or {}).full(e)


def coefficient_form(spec: ProblemSpec, side: str, e: Expr) -> AsymptoticForm:
    """Form of an expression built from the spec's coefficients, honouring declarations."""
    return coefficient_derived(spec, side, e).lead


def coefficient_derived(spec: ProblemSpec, side: str, e: Expr) -> Derived:
    return derive_full(e, frame_for(spec, side), spec.params, declared_overrides(spec, side))

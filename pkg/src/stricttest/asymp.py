"""Leading-order asymptotic algebra for C*exp(a*u^gamma)*u^p*L^q.

The local variable u is |x| near an infinite endpoint ("inf" frame, u -> oo,
L = log u) or the distance to a finite endpoint ("zero" frame, u -> 0+,
L = log(1/u)).  Only the leading term is tracked.  The exponential factor is
active only when a*u^gamma is unbounded: gamma > 0 in the inf frame and
gamma < 0 in the zero frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

EPS = 1e-9
INF = "inf"
ZERO = "zero"


class AsymptoticError(ArithmeticError):
    """A leading-order computation left the single-term algebra."""


class IncompatibleExponentials(AsymptoticError):
    pass


class NotIntegrableAtLeadingOrder(AsymptoticError):
    pass


class Cancellation(AsymptoticError):
    """Leading terms of a sum cancel; the next order is not tracked."""


class Convergence(Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"


def _snap(v: float) -> float:
    r = round(v)
    return float(r) if abs(v - r) < EPS else float(v)


def _same(u: float, v: float) -> bool:
    return abs(u - v) <= EPS * max(1.0, abs(u), abs(v))


@dataclass(frozen=True)
class AsymptoticForm:
    C: float
    a: float = 0.0
    gamma: float = 0.0
    p: float = 0.0
    q: float = 0.0
    frame: str = INF

    def __post_init__(self):
        if self.frame not in (INF, ZERO):
            raise ValueError(f"unknown frame {self.frame!r}")
        vals = (self.C, self.a, self.gamma, self.p, self.q)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite field in asymptotic form {vals}")
        if self.C == 0.0:
            if any(v != 0.0 for v in vals[1:]):
                object.__setattr__(self, "a", 0.0)
                object.__setattr__(self, "gamma", 0.0)
                object.__setattr__(self, "p", 0.0)
                object.__setattr__(self, "q", 0.0)
            return
        a, g = self.a, self.gamma
        active = a != 0.0 and ((g > 0) if self.frame == INF else (g < 0))
        if not active:
            # a bounded exponent only contributes a constant factor
            if a != 0.0 and g == 0.0:
                object.__setattr__(self, "C", self.C * math.exp(a))
            a, g = 0.0, 0.0
        a = _snap(a)
        g = _snap(g) if a != 0.0 else 0.0
        for name, v in (("a", a), ("gamma", g), ("p", _snap(self.p)), ("q", _snap(self.q))):
            object.__setattr__(self, name, v)

    # constructors
    @classmethod
    def zero(cls, frame: str = INF) -> "AsymptoticForm":
        return cls(0.0, frame=frame)

    @classmethod
    def const(cls, c: float, frame: str = INF) -> "AsymptoticForm":
        return cls(float(c), frame=frame)

    @property
    def is_zero(self) -> bool:
        return self.C == 0.0

    @property
    def is_constant(self) -> bool:
        return not self.is_zero and self.a == 0.0 and self.p == 0.0 and self.q == 0.0

    @property
    def has_exp(self) -> bool:
        return self.a != 0.0

    def tends_to_zero(self) -> bool:
        if self.is_zero:
            return True
        if self.a != 0.0:
            return self.a < 0
        lp = self.p if self.frame == INF else -self.p
        if lp != 0.0:
            return lp < 0
        return self.q < 0

    def tends_to_infinity(self) -> bool:
        if self.is_zero:
            return False
        if self.a != 0.0:
            return self.a > 0
        lp = self.p if self.frame == INF else -self.p
        if lp != 0.0:
            return lp > 0
        return self.q > 0

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = [f"{self.C:.6g}"]
        u = "u"
        if self.a:
            parts.append(f"exp({self.a:.6g}*{u}^{self.gamma:.6g})")
        if self.p:
            parts.append(f"{u}^{self.p:.6g}")
        if self.q:
            L = "log(u)" if self.frame == INF else "log(1/u)"
            parts.append(f"{L}^{self.q:.6g}")
        return "*".join(parts) + f" [{self.frame}]"

    def evaluate(self, u):
        """Numerical value of the form at u (used by tests and cross-checks)."""
        import numpy as np
        u = np.asarray(u, dtype=float)
        L = np.log(u) if self.frame == INF else np.log(1.0 / u)
        out = self.C * u ** self.p * L ** self.q
        if self.a:
            out = out * np.exp(self.a * u ** self.gamma)
        return out


# scale vector of log|f|:  a*u^gamma  +  P*L  +  q*log L  (+ const)
def _log_coeffs(f: AsymptoticForm):
    lp = f.p if f.frame == INF else -f.p
    return abs(f.gamma), f.a, lp, f.q


def compare(f: AsymptoticForm, g: AsymptoticForm) -> int:
    """+1 if |f| >> |g|, -1 if |f| << |g|, 0 if same order (ratio -> const)."""
    if f.frame != g.frame:
        raise ValueError("forms live in different frames")
    if f.is_zero and g.is_zero:
        return 0
    if f.is_zero:
        return -1
    if g.is_zero:
        return 1
    gf, af, pf, qf = _log_coeffs(f)
    gg, ag, pg, qg = _log_coeffs(g)
    if af or ag:
        if af and ag and _same(gf, gg):
            diff = af - ag
            if not _same(af, ag):
                return 1 if diff > 0 else -1
        elif af and (not ag or gf > gg):
            return 1 if af > 0 else -1
        elif ag:
            return -1 if ag > 0 else 1
    if not _same(pf, pg):
        return 1 if pf > pg else -1
    if not _same(qf, qg):
        return 1 if qf > qg else -1
    return 0


def _check_frame(f, g):
    if f.frame != g.frame:
        raise ValueError("forms live in different frames")


def neg(f: AsymptoticForm) -> AsymptoticForm:
    return replace(f, C=-f.C)


def scale(f: AsymptoticForm, c: float) -> AsymptoticForm:
    if c == 0 or f.is_zero:
        return AsymptoticForm.zero(f.frame)
    return replace(f, C=f.C * c)


def mul(f: AsymptoticForm, g: AsymptoticForm) -> AsymptoticForm:
    _check_frame(f, g)
    if f.is_zero or g.is_zero:
        return AsymptoticForm.zero(f.frame)
    if f.a and g.a and not _same(f.gamma, g.gamma):
        if (f.a > 0) != (g.a > 0):
            raise IncompatibleExponentials(f"exp terms of different order with opposite signs: {f}, {g}")
        big, small = (f, g) if abs(f.gamma) > abs(g.gamma) else (g, f)
        a, gamma = big.a, big.gamma
    elif f.a and g.a:
        a, gamma = f.a + g.a, f.gamma
        if _same(f.a, -g.a):
            a, gamma = 0.0, 0.0
    else:
        a = f.a or g.a
        gamma = f.gamma if f.a else g.gamma
    return AsymptoticForm(f.C * g.C, a, gamma, f.p + g.p, f.q + g.q, f.frame)


def reciprocal(f: AsymptoticForm) -> AsymptoticForm:
    if f.is_zero:
        raise ZeroDivisionError("reciprocal of the zero form")
    return AsymptoticForm(1.0 / f.C, -f.a, f.gamma, -f.p, -f.q, f.frame)


def power(f: AsymptoticForm, k: float) -> AsymptoticForm:
    if f.is_zero:
        if k > 0:
            return f
        raise ZeroDivisionError("negative power of the zero form")
    if f.C < 0:
        if float(k).is_integer():
            c = f.C ** k
        else:
            raise AsymptoticError(f"non-integer power {k} of a negative leading constant")
    else:
        c = f.C ** k
    return AsymptoticForm(c, f.a * k, f.gamma, f.p * k, f.q * k, f.frame)


def add(f: AsymptoticForm, g: AsymptoticForm) -> AsymptoticForm:
    _check_frame(f, g)
    c = compare(f, g)
    if c > 0:
        return f
    if c < 0:
        return g
    s = f.C + g.C
    if abs(s) <= EPS * max(abs(f.C), abs(g.C)):
        raise Cancellation(f"leading terms cancel: {f} + {g}")
    return replace(f, C=s)


def decide_convergence(f: AsymptoticForm) -> Convergence:
    """Integrability of the form toward its endpoint (u -> oo or u -> 0+)."""
    if f.is_zero:
        return Convergence.CONVERGES
    if f.a > 0:
        return Convergence.DIVERGES
    if f.a < 0:
        return Convergence.CONVERGES
    if f.frame == INF:
        ok = f.p < -1 - EPS or (_same(f.p, -1) and f.q < -1 - EPS)
    else:
        ok = f.p > -1 + EPS or (_same(f.p, -1) and f.q < -1 - EPS)
    return Convergence.CONVERGES if ok else Convergence.DIVERGES


def converges(f: AsymptoticForm) -> bool:
    return decide_convergence(f) is Convergence.CONVERGES


def integrate_tail(f: AsymptoticForm) -> AsymptoticForm:
    """Leading form of the convergent tail: int_u^oo f (inf) or int_0^u f (zero)."""
    if f.is_zero:
        return f
    if not converges(f):
        raise NotIntegrableAtLeadingOrder(f"tail of {f} diverges")
    if f.a:
        # d/du exp(a u^g) u^k ~ a g u^(g-1+k) exp(a u^g)
        c = f.C / (f.a * f.gamma)
        if f.frame == INF:
            c = -c
        return AsymptoticForm(c, f.a, f.gamma, f.p - f.gamma + 1, f.q, f.frame)
    if not _same(f.p, -1):
        c = f.C / (f.p + 1)
        if f.frame == INF:
            c = -c
        return AsymptoticForm(c, 0, 0, f.p + 1, f.q, f.frame)
    if _same(f.q, -1):
        raise NotIntegrableAtLeadingOrder("p=-1, q=-1 boundary case")
    # int u^-1 L^q with q < -1 gives L^(q+1)/(-(q+1)) in both frames
    return AsymptoticForm(f.C / (-(f.q + 1)), 0, 0, 0, f.q + 1, f.frame)


def partial_integral(f: AsymptoticForm) -> AsymptoticForm:
    """Leading form of a divergent integral taken toward the endpoint.

    inf frame: int_{u0}^u f; zero frame: int_u^{u0} f.  Both are oriented so a
    positive integrand gives a positive result.
    """
    if f.is_zero or converges(f):
        raise NotIntegrableAtLeadingOrder(f"integral of {f} converges at the endpoint")
    if f.a:
        c = f.C / abs(f.a * f.gamma)
        return AsymptoticForm(c, f.a, f.gamma, f.p - f.gamma + 1, f.q, f.frame)
    if not _same(f.p, -1):
        c = f.C / abs(f.p + 1)
        return AsymptoticForm(c, 0, 0, f.p + 1, f.q, f.frame)
    if _same(f.q, -1):
        raise NotIntegrableAtLeadingOrder("log-log antiderivative")
    return AsymptoticForm(f.C / (f.q + 1), 0, 0, 0, f.q + 1, f.frame)


def differentiate(f: AsymptoticForm) -> AsymptoticForm:
    """Formal leading-order derivative d/du (sign not tracked for tails)."""
    if f.is_zero or f.is_constant:
        return AsymptoticForm.zero(f.frame)
    if f.a:
        return AsymptoticForm(f.C * f.a * f.gamma, f.a, f.gamma, f.p + f.gamma - 1, f.q, f.frame)
    if f.p:
        return AsymptoticForm(f.C * f.p, 0, 0, f.p - 1, f.q, f.frame)
    c = f.C * f.q if f.frame == INF else -f.C * f.q
    return AsymptoticForm(c, 0, 0, -1, f.q - 1, f.frame)


def density_from_log_derivative(g: AsymptoticForm) -> AsymptoticForm:
    """Form of exp(-int_c^x g) toward the endpoint, up to a positive constant.

    When the integral of g converges the density tends to a positive constant.
    A power antiderivative gives an exponential factor, a logarithmic one a
    pure power.
    """
    if g.is_zero or converges(g):
        return AsymptoticForm.const(1.0, g.frame)
    F = partial_integral(g)
    # int_c^x g equals +F(u) in both frames once x increases toward the endpoint
    if F.a:
        raise AsymptoticError(f"density would be an iterated exponential: exp(-({F}))")
    if F.q == 0.0:
        return AsymptoticForm(1.0, -F.C, F.p, 0.0, 0.0, g.frame)
    if F.p == 0.0 and _same(F.q, 1.0):
        # exp(-C L): inf frame L=log u gives u^-C, zero frame L=log(1/u) gives u^C
        p = -F.C if g.frame == INF else F.C
        return AsymptoticForm(1.0, 0, 0, p, 0, g.frame)
    raise AsymptoticError(f"antiderivative {F} leaves the algebra after exponentiation")

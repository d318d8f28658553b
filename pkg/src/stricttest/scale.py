"""Scale densities, scale functions and Feller functionals.

For a drift m and diffusion coefficient sg on J:

    rho(x) = exp(-int_c^x 2 m/sg^2),   s(x) = int_c^x rho.

The *original* bundle uses (mu, sigma), the *auxiliary* bundle (mu + b*sigma,
sigma) and the *tilde* bundle the second diffusion of a pair.

Every endpoint quantity is decided by two routes.  The analytic route maps
the coefficients to leading-order forms and applies the asymptotic algebra.
The numeric route walks a geometric ladder toward the endpoint; on each rung
the density is integrated exactly under a piecewise-linear log-density
(an exponential integrator), which keeps s, v and the weighted tails
(s(r)-s)w/rho in log space and free of overflow.  Endpoints are handled in a
canonical orientation: a left endpoint is mirrored to a right one by x -> -x.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import asymp
from .asymp import AsymptoticError, AsymptoticForm
from .coeffspec import (LEFT, RIGHT, Add, Div, Expr, Mul, Pow, ProblemSpec, Const,
                        vectorize)
from .derive import coefficient_derived, coefficient_form
from .quad import (DEFAULT_DEPTH, DEFAULT_TOL, IntegralVerdict, classify_increments,
                   gauss_kronrod, ladder_points, ladder_positions, NODES, WEIGHTS_K)
from .tri import Tri, from_verdict

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)

ORIGINAL = "original"
AUXILIARY = "auxiliary"
TILDE = "tilde"
SIDES = (LEFT, RIGHT)


@dataclass(frozen=True)
class AnalysisOptions:
    """Numeric knobs shared by the analysis modules."""

    tol: float = DEFAULT_TOL
    depth: int = DEFAULT_DEPTH
    use_asymptotics: bool = True
    cross_check: bool = False
    cells: int = 128
    nested_rtol: float = 1e-5
    guard_rungs: int = 8


DEFAULT_OPTIONS = AnalysisOptions()


def bundle_coefficients(spec: ProblemSpec, which: str) -> tuple[Expr, Expr]:
    if which == ORIGINAL:
        return spec.mu, spec.sigma
    if which == AUXILIARY:
        return Add(spec.mu, Mul(spec.b, spec.sigma)), spec.sigma
    if which == TILDE:
        return spec.coefficient("mutilde"), spec.coefficient("sigmatilde")
    raise ValueError(f"unknown bundle {which!r}")


# ---------------------------------------------------------------- analytic route

@dataclass(frozen=True)
class EndpointForms:
    """Canonical-orientation forms near one endpoint.

    `uncertain` marks forms known only up to a slowly varying factor; a
    verdict on a borderline u^-1 form is then left to quadrature.
    """

    drift: AsymptoticForm
    sigma2: AsymptoticForm
    log_derivative: AsymptoticForm
    density: AsymptoticForm
    s_finite: bool
    tail: AsymptoticForm | None  # form of s(r) - s when s(r) is finite
    uncertain: bool = False


def _log_antiderivative(g: AsymptoticForm) -> bool:
    return not g.is_zero and g.a == 0.0 and abs(g.p + 1.0) <= asymp.EPS and g.q == 0.0


def endpoint_forms(spec: ProblemSpec, drift: Expr, sigma: Expr, side: str) -> EndpointForms:
    m = coefficient_form(spec, side, drift)
    sg = coefficient_form(spec, side, sigma)
    if sg.is_zero:
        raise AsymptoticError("diffusion coefficient vanishes at leading order")
    if side == LEFT:
        m = asymp.neg(m)
    s2 = asymp.power(sg, 2)
    gd = coefficient_derived(spec, side, Div(Mul(Const(2.0), drift), Pow(sigma, Const(2.0))))
    g = asymp.neg(gd.lead) if side == LEFT else gd.lead
    rho = asymp.density_from_log_derivative(g)
    uncertain = gd.sv
    if _log_antiderivative(g):
        # rho is a pure power only when the rest of 2mu/sigma^2 is integrable
        rem = gd.rem
        uncertain |= rem is None or not (rem.is_zero or asymp.converges(rem))
    fin = asymp.converges(rho)
    tail = asymp.integrate_tail(rho) if fin else None
    return EndpointForms(m, s2, g, rho, fin, tail, uncertain)


def _borderline(f: AsymptoticForm) -> bool:
    return not f.is_zero and f.a == 0.0 and abs(f.p + 1.0) <= asymp.EPS


def _form_verdict(f: AsymptoticForm, what: str, uncertain: bool = False) -> IntegralVerdict:
    if uncertain and _borderline(f):
        raise AsymptoticError(f"{what} ~ {f} is borderline and known only up to a slowly varying factor")
    if asymp.converges(f):
        return IntegralVerdict.finite(route="asymptotic", note=f"{what} ~ {f}")
    return IntegralVerdict.divergent(route="asymptotic", note=f"{what} ~ {f}")


def _analytic_s_limit(ef: EndpointForms) -> IntegralVerdict:
    return _form_verdict(ef.density, "rho", ef.uncertain)


def _analytic_feller_v(ef: EndpointForms) -> IntegralVerdict:
    h = asymp.reciprocal(asymp.mul(ef.density, ef.sigma2))
    if asymp.converges(h) and not (ef.uncertain and _borderline(h)):
        return _form_verdict(ef.density, "rho*M, M bounded, rho", ef.uncertain)
    M = asymp.partial_integral(h)
    return _form_verdict(asymp.mul(ef.density, M), "rho*M", ef.uncertain)


def _analytic_weighted(ef: EndpointForms, weight: AsymptoticForm, uncertain: bool = False) -> IntegralVerdict:
    """(s(r)-s) * weight / rho toward the endpoint; requires s(r) finite."""
    if weight.is_zero:
        return IntegralVerdict.finite(0.0, 0.0, route="asymptotic", note="weight vanishes")
    f = asymp.mul(asymp.mul(ef.tail, asymp.reciprocal(ef.density)), weight)
    return _form_verdict(f, "(s(r)-s)w/rho", ef.uncertain or uncertain)


# ---------------------------------------------------------------- numeric route

def _log_phi1(z: np.ndarray) -> np.ndarray:
    """log of (1 - exp(-z))/z, stable for all real z."""
    out = np.empty_like(z)
    small = np.abs(z) < 1e-6
    zs = z[small]
    out[small] = np.log1p(-zs / 2 + zs * zs / 6)
    pos = (z > 0) & ~small
    zp = z[pos]
    out[pos] = np.log(-np.expm1(-zp)) - np.log(zp)
    neg = (z < 0) & ~small
    zn = -z[neg]
    out[neg] = zn + np.log(-np.expm1(-zn)) - np.log(zn)
    return out


def _log_phi2(z: np.ndarray) -> np.ndarray:
    """log of (z - 1 + exp(-z))/z^2, stable for all real z."""
    out = np.empty_like(z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    out[small] = np.log(0.5 - zs / 6 + zs * zs / 24 - zs ** 3 / 120)
    mid = ~small & (z > -1.0)
    zm = z[mid]
    out[mid] = np.log(zm + np.expm1(-zm)) - 2 * np.log(np.abs(zm))
    big = ~small & (z <= -1.0)
    zb = -z[big]
    out[big] = zb + np.log1p(-(zb + 1.0) * np.exp(-zb)) - 2 * np.log(zb)
    return out


def _exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _compose(A_out, B_out, A_in, B_in):
    # maps L -> logaddexp(L - A, B); (outer o inner)
    with np.errstate(invalid="ignore"):
        return A_out + A_in, np.logaddexp(B_in - A_out, B_out)


def _scan_forward(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """L_{n+1} = logaddexp(L_n - A_n, B_n) from L_0 = -inf; returns L_1..L_N."""
    A, B = A.copy(), B.copy()
    d = 1
    while d < A.size:
        A_new, B_new = _compose(A[d:], B[d:], A[:-d], B[:-d])
        A[d:], B[d:] = A_new, B_new
        d *= 2
    return B


def _scan_backward(A: np.ndarray, B: np.ndarray, terminal: float) -> np.ndarray:
    """L_i = logaddexp(L_{i+1} - A_i, B_i) from L_N = terminal; returns L_0..L_N."""
    A, B = A.copy(), B.copy()
    d = 1
    while d < A.size:
        A_new, B_new = _compose(A[:-d], B[:-d], A[d:], B[d:])
        A[:-d], B[:-d] = A_new, B_new
        d *= 2
    with np.errstate(invalid="ignore"):
        L = np.logaddexp(terminal - A, B)
    return np.concatenate([L, [terminal]])


def _lse_rows(a: np.ndarray) -> np.ndarray:
    m = np.max(a, axis=1)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(all="ignore"):
        out = safe + np.log(np.sum(np.exp(a - safe[:, None]), axis=1))
    return np.where(np.isneginf(m), -np.inf, np.where(np.isposinf(m), np.inf, out))


class _Ladder:
    """One discretisation of the canonical ladder with n cells per rung."""

    def __init__(self, pts: np.ndarray, n: int, g: Callable, h: Callable):
        self.pts = pts
        self.n = n
        K = pts.size - 1
        t = np.linspace(0.0, 1.0, n + 1)
        tau = np.tile(t, (K, 1))
        # the first rung is graded toward the start, where coefficients may be singular
        tau[0] = t ** 4
        bounds = pts[:-1, None] + (pts[1:] - pts[:-1])[:, None] * tau
        lo = bounds[:, :-1]
        width = np.diff(bounds, axis=1)
        # Gauss-Legendre nodes are interior, so kinks at cell edges cost nothing
        self.X = lo[:, :, None] + (0.5 * width)[:, :, None] * (_GL_X + 1.0)[None, None, :]
        self.dx = width.ravel()
        with np.errstate(all="ignore"):
            gv = g(self.X.ravel()).reshape(self.X.shape)
            hv = h(self.X.ravel()).reshape(self.X.shape)
        ok = (np.isfinite(gv).all(axis=(1, 2)) & np.isfinite(hv).all(axis=(1, 2))
              & (hv > 0).all(axis=(1, 2)))
        self.rungs = int(np.argmin(ok)) if not ok.all() else K
        R = self.rungs
        self.dx = self.dx[: R * n]
        dphi = self._avg(gv[:R]) * self.dx
        self.phi = np.concatenate([[0.0], np.cumsum(dphi)])
        self.z = dphi
        with np.errstate(divide="ignore"):
            self.ldx = np.log(self.dx)
            self.lh = np.log(self._avg(hv[:R]))
        self.lp1 = _log_phi1(dphi)
        self.lp2 = _log_phi2(dphi)
        # log of the s-increment of each cell
        self.lds = -self.phi[:-1] + self.ldx + self.lp1
        self._log_r = None

    @staticmethod
    def _avg(v: np.ndarray) -> np.ndarray:
        return (0.5 * (v @ _GL_W)).ravel()

    def weight_avg(self, w: Callable) -> np.ndarray:
        X = self.X[: self.rungs]
        with np.errstate(all="ignore"):
            wv = np.abs(w(X.ravel())).reshape(X.shape)
            return np.log(self._avg(wv))

    def rung_sum(self, log_cells: np.ndarray, rungs: int) -> np.ndarray:
        a = log_cells[: rungs * self.n].reshape(rungs, self.n)
        with np.errstate(over="ignore"):
            return np.exp(_lse_rows(a))

    def s_increments(self, rungs: int) -> np.ndarray:
        return self.rung_sum(self.lds, rungs)

    def v_increments(self, rungs: int) -> np.ndarray:
        # P = rho*M with M = int_c 1/(rho sg^2): P_{i+1} = P_i e^{-z_i} + h_i dx_i phi1_i
        lb = self.lh + self.ldx + self.lp1
        logP = np.concatenate([[-np.inf], _scan_forward(self.z, lb)])
        with np.errstate(all="ignore"):
            cell = np.logaddexp(logP[:-1] + self.ldx + self.lp1, self.lh + 2 * self.ldx + self.lp2)
        return self.rung_sum(cell, rungs)

    def log_r(self) -> np.ndarray:
        """log of (s(r)-s)/rho at every cell boundary: R_i = R_{i+1} e^{-z_i} + dx_i phi1_i."""
        if self._log_r is not None:
            return self._log_r
        with np.errstate(divide="ignore"):
            lds_rung = np.log(self.rung_sum(self.lds, self.rungs))
        term = -np.inf
        if self.rungs >= 2 and np.isfinite(lds_rung[-2:]).all():
            r = math.exp(lds_rung[-1] - lds_rung[-2])
            if r < 1.0:
                # geometric remainder of s beyond the ladder, divided by rho there
                term = lds_rung[-1] + math.log(r / (1.0 - r)) + self.phi[-1]
        self._log_r = _scan_backward(self.z, self.ldx + self.lp1, term)
        return self._log_r

    def weighted_increments(self, lw: np.ndarray, rungs: int) -> np.ndarray:
        lr = self.log_r()
        with np.errstate(all="ignore"):
            cell = lw + np.logaddexp(lr[1:] + self.ldx + self.lp1, 2 * self.ldx + self.lp2)
        return self.rung_sum(cell, rungs)


class NumericEndpoint:
    """Numeric ladder analysis of one endpoint for one bundle."""

    def __init__(self, spec: ProblemSpec, drift: Expr, sigma: Expr, side: str,
                 options: AnalysisOptions):
        self.spec = spec
        self.side = side
        self.options = options
        mu = vectorize(drift, spec.params, clean=True)
        sg = vectorize(sigma, spec.params, clean=True)
        sgn = -1.0 if side == LEFT else 1.0
        self._reflect = sgn
        if side == RIGHT:
            self.g = lambda x: 2.0 * mu(x) / sg(x) ** 2
            self.h = lambda x: 1.0 / sg(x) ** 2
            endpoint, start = spec.r, spec.c
        else:
            self.g = lambda x: -2.0 * mu(-x) / sg(-x) ** 2
            self.h = lambda x: 1.0 / sg(-x) ** 2
            endpoint, start = -spec.l, -spec.c
        self.endpoint = endpoint
        depth = options.depth + options.guard_rungs
        self.pts = ladder_points(start, endpoint, depth)
        n = options.cells
        # three resolutions for Romberg extrapolation of every rung integral
        self.levels = [_Ladder(self.pts, m, self.g, self.h) for m in (n // 2, n, 2 * n)]
        avail = min(lad.rungs for lad in self.levels)
        self.rungs = max(0, min(options.depth, avail - options.guard_rungs))
        if avail < self.pts.size - 1:
            self.rungs = min(options.depth, avail)
        self.positions = ladder_positions(self.pts[: self.rungs + 1], endpoint)
        self._s = None

    def _classify(self, incs: list) -> IntegralVerdict:
        a, b, c = incs
        with np.errstate(all="ignore"):
            r1 = b + (b - a) / 3.0
            r2 = c + (c - b) / 3.0
            err = np.abs(r2 - r1)
            vals = np.where(np.isfinite(r2), r2, c)
        fit = classify_increments(vals, self.positions, tol=self.options.tol,
                                  rtol=self.options.nested_rtol, errors=np.nan_to_num(err, nan=np.inf))
        if fit.kind == IntegralVerdict.FINITE:
            return IntegralVerdict.finite(fit.value, fit.abs_err, "numeric", fit.note)
        if fit.kind == IntegralVerdict.DIVERGENT:
            return IntegralVerdict.divergent("numeric", fit.note)
        return IntegralVerdict.inconclusive("numeric", fit.note)

    def s_limit(self) -> IntegralVerdict:
        if self._s is None:
            if self.rungs < 2:
                self._s = IntegralVerdict.inconclusive(note="coefficients not finite near the start")
            else:
                self._s = self._classify([lad.s_increments(self.rungs) for lad in self.levels])
        return self._s

    def feller_v(self) -> IntegralVerdict:
        if self.rungs < 2:
            return IntegralVerdict.inconclusive(note="coefficients not finite near the start")
        return self._classify([lad.v_increments(self.rungs) for lad in self.levels])

    def weighted(self, w: Callable) -> IntegralVerdict:
        """(s(r)-s) w / rho toward the endpoint (canonical w)."""
        s = self.s_limit()
        if not s.is_finite:
            return IntegralVerdict.inconclusive(note="s(r) undetermined") if not s.is_conclusive \
                else IntegralVerdict.divergent(note="s(r) infinite")
        return self._classify([lad.weighted_increments(lad.weight_avg(w), self.rungs)
                               for lad in self.levels])

    def canonical(self, f: Callable) -> Callable:
        if self.side == RIGHT:
            return f
        return lambda x: f(-x)


# ---------------------------------------------------------------- combined endpoint analysis

def _agree(a: IntegralVerdict, b: IntegralVerdict) -> bool:
    return not (a.is_conclusive and b.is_conclusive and a.kind != b.kind)


def _combine(analytic: IntegralVerdict | None, numeric_fn: Callable[[], IntegralVerdict],
             cross_check: bool) -> IntegralVerdict:
    """Analytic route is authoritative; numeric decides when it is unavailable."""
    if analytic is None:
        return numeric_fn()
    if not cross_check:
        return analytic
    num = numeric_fn()
    if _agree(analytic, num):
        value = num.value if (num.is_finite and analytic.is_finite) else analytic.value
        err = num.abs_err if value is not None else analytic.abs_err
        return IntegralVerdict(analytic.kind, value, err, "asymptotic+numeric",
                               f"{analytic.note}; numeric: {num.kind}")
    return IntegralVerdict(analytic.kind, analytic.value, analytic.abs_err, analytic.route,
                           f"{analytic.note}; numeric cross-check disagrees ({num})")


class EndpointAnalysis:
    """All scale-related quantities of one bundle at one endpoint."""

    def __init__(self, spec: ProblemSpec, which: str, side: str, options: AnalysisOptions):
        self.spec = spec
        self.which = which
        self.side = side
        self.options = options
        self.drift, self.sigma = bundle_coefficients(spec, which)
        self.forms: EndpointForms | None = None
        self.form_error = ""
        if options.use_asymptotics:
            try:
                self.forms = endpoint_forms(spec, self.drift, self.sigma, side)
            except (AsymptoticError, ZeroDivisionError, ValueError) as exc:
                self.form_error = str(exc)
        self._numeric = None
        self._lock = threading.Lock()
        self._cache: dict = {}

    @property
    def numeric(self) -> NumericEndpoint:
        with self._lock:
            if self._numeric is None:
                self._numeric = NumericEndpoint(self.spec, self.drift, self.sigma, self.side, self.options)
            return self._numeric

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def s_limit(self) -> IntegralVerdict:
        def run():
            a = None
            if self.forms:
                try:
                    a = _analytic_s_limit(self.forms)
                except AsymptoticError:
                    a = None
            return _combine(a, lambda: self.numeric.s_limit(), self.options.cross_check)
        return self._memo("s", run)

    def feller_v(self) -> IntegralVerdict:
        def run():
            a = None
            if self.forms:
                try:
                    a = _analytic_feller_v(self.forms)
                except AsymptoticError:
                    a = None
            return _combine(a, lambda: self.numeric.feller_v(), self.options.cross_check)
        return self._memo("v", run)

    def weighted(self, weight: Expr, label: str = "") -> IntegralVerdict:
        """Verdict on (s(r)-s) w / rho at this endpoint; Divergent when s(r) is infinite."""
        def run():
            s = self.s_limit()
            if s.is_divergent:
                return IntegralVerdict.divergent(route=s.route, note="s infinite at the endpoint")
            a = None
            if self.forms and self.forms.s_finite:
                try:
                    wd = coefficient_derived(self.spec, self.side, weight)
                    a = _analytic_weighted(self.forms, wd.lead, wd.sv)
                except (AsymptoticError, ZeroDivisionError, ValueError):
                    a = None
            wfun = vectorize(weight, self.spec.params, clean=True)

            def num():
                ne = self.numeric
                return ne.weighted(ne.canonical(wfun))
            return _combine(a, num, self.options.cross_check)
        return self._memo(("w", weight), run)

    def feller_s(self) -> IntegralVerdict:
        """The s-route exit integral (s(r)-s)/(rho sg^2)."""
        return self.weighted(Div(Const(1.0), Pow(self.sigma, Const(2.0))), "1/sigma^2")


# ---------------------------------------------------------------- public objects

@dataclass(frozen=True)
class FellerFunctional:
    endpoint: str
    which: str
    v_limit: IntegralVerdict
    s_route: IntegralVerdict
    exits: Tri
    diagnostic: str = ""


class ScaleBundle:
    """Density and scale function of one bundle with endpoint limits.

    rho(x) and s(x) are evaluated from the reference point c by nested
    Gauss-Kronrod quadrature; a grid of values is cached on first use.
    """

    GRID = 1025

    def __init__(self, spec: ProblemSpec, which: str, options: AnalysisOptions = DEFAULT_OPTIONS,
                 analyses: dict | None = None):
        self.spec = spec
        self.which = which
        self.options = options
        self.drift, self.sigma = bundle_coefficients(spec, which)
        self.c = spec.c
        self._mu = vectorize(self.drift, spec.params)
        self._sg = vectorize(self.sigma, spec.params)
        self.ends = analyses or {side: EndpointAnalysis(spec, which, side, options) for side in SIDES}
        self.s_at_l = self._oriented(self.ends[LEFT].s_limit(), -1.0)
        self.s_at_r = self.ends[RIGHT].s_limit()
        self.density_forms = {side: (self.ends[side].forms.density if self.ends[side].forms else None)
                              for side in SIDES}
        self._grid = None
        self._lock = threading.Lock()

    @staticmethod
    def _oriented(v: IntegralVerdict, sign: float) -> IntegralVerdict:
        if v.is_finite and v.value is not None:
            return IntegralVerdict(v.kind, sign * v.value, v.abs_err, v.route, v.note)
        return v

    def g(self, x):
        return 2.0 * self._mu(x) / self._sg(x) ** 2

    # nested quadrature from a to b: returns (int g, int exp(-(Phi - Phi(a))))
    def _inner_phi(self, a: float, y: np.ndarray) -> np.ndarray:
        half = 0.5 * (y - a)
        mid = 0.5 * (y + a)
        nodes = mid[:, None] + half[:, None] * NODES[None, :]
        vals = self.g(nodes.ravel()).reshape(nodes.shape)
        return half * (vals @ WEIGHTS_K)

    def _segment(self, a: float, b: float) -> tuple[float, float]:
        if a == b:
            return 0.0, 0.0
        lo, hi = min(a, b), max(a, b)
        dphi, _, _ = gauss_kronrod(self.g, lo, hi, tol=1e-13, rtol=1e-13)
        if b < a:
            dphi = -dphi
        ds, _, _ = gauss_kronrod(lambda y: np.exp(-self._inner_phi(a, y)), lo, hi,
                                 tol=1e-13, rtol=1e-12)
        return dphi, (ds if b > a else -ds)

    def _build_grid(self):
        with self._lock:
            if self._grid is not None:
                return self._grid
            tl, tr = math.atan(self.spec.l), math.atan(self.spec.r)
            w = tr - tl
            th = np.linspace(tl + w / 64, tr - w / 64, self.GRID)
            xs = np.tan(th)
            xs = np.unique(np.concatenate([xs, [self.c]]))
            ic = int(np.searchsorted(xs, self.c))
            phi = np.zeros_like(xs)
            s = np.zeros_like(xs)
            for i in range(ic + 1, xs.size):
                dp, ds = self._segment(xs[i - 1], xs[i])
                phi[i] = phi[i - 1] + dp
                s[i] = s[i - 1] + _exp(-phi[i - 1]) * ds
            for i in range(ic - 1, -1, -1):
                dp, ds = self._segment(xs[i + 1], xs[i])
                phi[i] = phi[i + 1] + dp
                s[i] = s[i + 1] + _exp(-phi[i + 1]) * ds
            self._grid = (xs, phi, s)
            return self._grid

    def _point(self, x: float) -> tuple[float, float]:
        if not self.spec.l < x < self.spec.r:
            raise ValueError(f"x={x} outside J")
        xs, phi, s = self._build_grid()
        i = int(np.argmin(np.abs(xs - x)))
        dp, ds = self._segment(xs[i], x)
        return phi[i] + dp, s[i] + _exp(-phi[i]) * ds

    def log_rho(self, x: float) -> float:
        return self._point(x)[0] * -1.0

    def rho(self, x):
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([_exp(-self._point(v)[0]) for v in xv])
        return out if np.ndim(x) else float(out[0])

    def s(self, x):
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([self._point(v)[1] for v in xv])
        return out if np.ndim(x) else float(out[0])

    def s_limit(self, side: str) -> IntegralVerdict:
        return self.s_at_l if side == LEFT else self.s_at_r


class ScaleAnalysis:
    """Per-spec cache of endpoint analyses for every bundle."""

    def __init__(self, spec: ProblemSpec, options: AnalysisOptions = DEFAULT_OPTIONS):
        self.spec = spec
        self.options = options
        self._ends: dict = {}
        self._bundles: dict = {}
        self._lock = threading.Lock()

    def endpoint(self, which: str, side: str) -> EndpointAnalysis:
        with self._lock:
            key = (which, side)
            if key not in self._ends:
                self._ends[key] = EndpointAnalysis(self.spec, which, side, self.options)
            return self._ends[key]

    def bundle(self, which: str) -> ScaleBundle:
        if which not in self._bundles:
            ends = {side: self.endpoint(which, side) for side in SIDES}
            self._bundles[which] = ScaleBundle(self.spec, which, self.options, ends)
        return self._bundles[which]

    def s_limit(self, which: str, side: str) -> IntegralVerdict:
        return self.endpoint(which, side).s_limit()

    def feller(self, which: str, side: str) -> FellerFunctional:
        ea = self.endpoint(which, side)
        v = ea.feller_v()
        sr = ea.feller_s()
        diag = ""
        if not _agree(v, sr):
            diag = f"v-route {v.kind} vs s-route {sr.kind}"
            exits = Tri.UNKNOWN
        else:
            tv, ts = from_verdict(v), from_verdict(sr)
            exits = tv if tv.known else ts
        return FellerFunctional(side, which, v, sr, exits, diag)

    def weighted(self, which: str, side: str, weight: Expr) -> IntegralVerdict:
        return self.endpoint(which, side).weighted(weight)


def build_scale(spec: ProblemSpec, which: str = ORIGINAL,
                options: AnalysisOptions = DEFAULT_OPTIONS) -> ScaleBundle:
    return ScaleBundle(spec, which, options)


def feller_limit(spec: ProblemSpec, which: str, endpoint: str,
                 options: AnalysisOptions = DEFAULT_OPTIONS) -> FellerFunctional:
    return ScaleAnalysis(spec, options).feller(which, endpoint)


def describe_forms(spec: ProblemSpec, which: str, side: str) -> str:
    drift, sigma = bundle_coefficients(spec, which)
    try:
        ef = endpoint_forms(spec, drift, sigma, side)
    except AsymptoticError as exc:
        return f"{which} {side}: no forms ({exc})"
    return (f"{which} {side}: drift {ef.drift}, sigma^2 {ef.sigma2}, rho {ef.density}"
            + (f", s(r)-s {ef.tail}" if ef.tail else ""))

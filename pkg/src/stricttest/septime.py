"""Separating points and the mutual arrangement of the laws of two diffusions.

P is the law of dY = mu dt + sigma dW and P~ the law of dY~ = mu~ dt + sigma~ dW~,
both started at x0 and absorbed at the endpoints of J.  The separating set D
determines the separating time S; every arrangement flag below is read off
from null / co-null statements about S under P and P~.

Condition identifiers:

    nonsep_s[e], nonsep_stilde[e]   endpoint non-separation tested through s or s~
    reach[P|Ptilde,e]         the path approaches e with positive probability
    exit[P|Ptilde,e]          the path exits at e in finite time
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .coeffspec import (LEFT, RIGHT, Add, Const, Div, Expr, Mul, Neg, Pow, ProblemSpec, Sub,
                        ValidationError, probe_points, vectorize)
from .quad import gauss_kronrod, ladder_points, probe_tail
from .scale import DEFAULT_OPTIONS, ORIGINAL, TILDE, AnalysisOptions, ScaleAnalysis
from .tri import Tri, all_, any_, from_verdict, implies

REL_EQ = 1e-12
CHECK_RUNGS = 40
CELL_PANELS = 400
LOCATE_STEPS = 60
PROBE_ULPS = 1e6
_GL_X = np.polynomial.legendre.leggauss(5)[0]
_SWAP = {"mu": "mutilde", "mutilde": "mu", "sigma": "sigmatilde", "sigmatilde": "sigma"}


@dataclass(frozen=True)
class SdePair:
    """Two diffusions on a shared interval and start point.

    `spec.mu`, `spec.sigma` give P; `spec.mutilde`, `spec.sigmatilde` give P~.
    `gap` optionally states mu~ - mu in closed form, which avoids
    cancellation when the second drift is built from the first.
    """

    spec: ProblemSpec
    gap: Expr | None = None

    @classmethod
    def build(cls, interval, x0: float, mu: Expr, sigma: Expr, mutilde: Expr, sigmatilde: Expr,
              params=None, c: float | None = None, gap: Expr | None = None) -> "SdePair":
        spec = ProblemSpec(tuple(float(v) for v in interval), Const(float(x0)), mu, sigma,
                           params=dict(params or {}), mutilde=mutilde, sigmatilde=sigmatilde,
                           c_expr=None if c is None else Const(float(c)))
        spec.validate()
        return cls(spec, gap)

    @classmethod
    def from_spec(cls, spec: ProblemSpec) -> "SdePair":
        if not spec.is_pair:
            raise ValidationError("a pair needs mutilde and/or sigmatilde")
        return cls(spec)

    @property
    def mu(self) -> Expr:
        return self.spec.mu

    @property
    def sigma(self) -> Expr:
        return self.spec.sigma

    @property
    def mutilde(self) -> Expr:
        return self.spec.coefficient("mutilde")

    @property
    def sigmatilde(self) -> Expr:
        return self.spec.coefficient("sigmatilde")

    @property
    def drift_gap(self) -> Expr:
        return self.gap if self.gap is not None else Sub(self.mutilde, self.mu)

    def swapped(self) -> "SdePair":
        asym = {(side, _SWAP.get(name, name)): d for (side, name), d in self.spec.asymptotics.items()}
        spec = replace(self.spec, mu=self.mutilde, sigma=self.sigmatilde, mutilde=self.mu,
                       sigmatilde=self.sigma, asymptotics=asym)
        return SdePair(spec, None if self.gap is None else Neg(self.gap))


def exponential_pair(spec: ProblemSpec) -> SdePair:
    """P~ = law of the auxiliary diffusion: drift mu + b sigma, same sigma."""
    bs = Mul(spec.b, spec.sigma)
    pspec = replace(spec, mutilde=Add(spec.mu, bs), sigmatilde=spec.sigma)
    return SdePair(pspec, bs)


def separation_weight(pair: SdePair, tilde: bool = False) -> Expr:
    sg = pair.sigmatilde if tilde else pair.sigma
    return Div(Pow(pair.drift_gap, Const(2.0)), Pow(sg, Const(4.0)))


# ---------------------------------------------------------------- separating set

@dataclass(frozen=True)
class SeparatingSetReport:
    interior_separating: tuple          # maximal closed intervals (a, b) inside J
    left_endpoint_separating: Tri
    right_endpoint_separating: Tri
    alpha: float | None                 # nearest separating point at or left of x0
    beta: float | None                  # nearest separating point at or right of x0
    identical: bool = False
    x0_separating: bool = False
    evidence: tuple = ()
    diagnostics: tuple = ()

    def endpoint(self, side: str) -> Tri:
        return self.left_endpoint_separating if side == LEFT else self.right_endpoint_separating

    def side_interior(self, side: str, x0: float) -> bool:
        """True when D meets the open half of J on this side of x0 (x0 included)."""
        if side == LEFT:
            return any(a <= x0 for a, _ in self.interior_separating)
        return any(b >= x0 for _, b in self.interior_separating)

    @property
    def is_empty(self) -> Tri:
        if self.interior_separating:
            return Tri.NO
        return ~any_(self.left_endpoint_separating, self.right_endpoint_separating)


def _check_points(spec: ProblemSpec, depth: int) -> np.ndarray:
    pts = [probe_points(spec.interval), [spec.x0]]
    for end in spec.interval:
        lad = ladder_points(spec.x0, end, min(depth, CHECK_RUNGS))
        pts.append(lad[np.isfinite(lad) & (lad > spec.l) & (lad < spec.r)])
    return np.unique(np.concatenate(pts))


def _sq_equal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(a), np.abs(b))
    return np.abs(a - b) <= REL_EQ * scale


def _interior_flags(pair: SdePair, pts: np.ndarray) -> tuple[np.ndarray, dict]:
    """Flag each cell [pts[i], pts[i+1]] that contains separating points.

    Cells flagged for an isolated singularity are pinned to its location.
    """
    spec = pair.spec
    a, b = pts[:-1], pts[1:]
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b)[:, None] + half[:, None] * _GL_X[None, :]
    allx = np.concatenate([nodes, a[:, None], b[:, None]], axis=1)
    flat = allx.ravel()
    with np.errstate(all="ignore"):
        coeffs = [vectorize(e, spec.params)(flat) for e in (pair.mu, pair.mutilde, pair.sigma, pair.sigmatilde)]
        finite = np.logical_and.reduce([np.isfinite(v) for v in coeffs]).reshape(allx.shape)
        s2, t2 = (coeffs[2] ** 2).reshape(allx.shape), (coeffs[3] ** 2).reshape(allx.shape)
        ok2 = np.isfinite(s2) & np.isfinite(t2)
        flags = (ok2 & ~_sq_equal(s2, t2)).any(axis=1)
        w = vectorize(separation_weight(pair), spec.params, clean=True)
        wv = w(flat).reshape(allx.shape)
        cells = half * (np.where(finite[:, :5], wv[:, :5], 0.0) @ np.polynomial.legendre.leggauss(5)[1])
        flags |= (finite & ~np.isfinite(wv)).any(axis=1) | ~np.isfinite(cells)
    pins = {}
    for i in np.flatnonzero(~flags):
        p = _cell_singular(w, float(a[i]), float(b[i]), spec.l, spec.r)
        if p is not None:
            flags[i] = True
            pins[int(i)] = p
    return flags, pins


def _converges_on(w, a: float, b: float) -> bool:
    return gauss_kronrod(w, a, b, tol=1e-12, rtol=1e-9, max_panels=CELL_PANELS)[2]


def _cell_singular(w, a: float, b: float, l: float, r: float) -> float | None:
    """A point of the cell [a, b] near which w is not integrable, or None.

    A cell the adaptive rule cannot resolve is searched for the peak of |w|
    by repeated zooming; the peak is then probed from both sides, stopping
    well above its floating-point resolution.
    """
    if _converges_on(w, a, b):
        return None
    lo, hi = a, b
    p = 0.5 * (a + b)
    for _ in range(LOCATE_STEPS):
        xs = np.linspace(lo, hi, 33)
        with np.errstate(all="ignore"):
            v = np.abs(np.asarray(w(xs), dtype=float))
        if not np.all(np.isfinite(v)):
            return float(xs[np.argmin(np.isfinite(v))])
        k = int(np.argmax(v))
        p = float(xs[k])
        lo, hi = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, 32)])
        if hi - lo <= 4 * math.ulp(p):
            break
    reach = 0.5 * (b - a)
    floor = PROBE_ULPS * math.ulp(p) if p else 1e-300
    depth = int(min(max(math.log2(reach / floor), 8), 60))
    out = []
    with np.errstate(all="ignore"):
        if p - reach > l:
            out.append(probe_tail(w, p, "right", start=p - reach, depth=depth))
        if p + reach < r:
            out.append(probe_tail(w, p, "left", start=p + reach, depth=depth))
    return p if any(v.is_divergent for v in out) else None


def _merge(pts: np.ndarray, flags: np.ndarray, pins: dict | None = None) -> tuple:
    pins = pins or {}
    out = []
    i = 0
    while i < flags.size:
        if flags[i]:
            j = i
            while j + 1 < flags.size and flags[j + 1]:
                j += 1
            lo = pins.get(i, float(pts[i]))
            hi = pins.get(j, float(pts[j + 1]))
            out.append((float(lo), float(hi)))
            i = j + 1
        else:
            i += 1
    return tuple(out)


def laws_identical(pair: SdePair, depth: int = DEFAULT_OPTIONS.depth) -> bool:
    """mu = mu~ and sigma^2 = sigma~^2 on every check point (structural shortcut first)."""
    if pair.mu == pair.mutilde and pair.sigma == pair.sigmatilde:
        return True
    spec = pair.spec
    pts = _check_points(spec, depth)
    with np.errstate(all="ignore"):
        g = vectorize(pair.drift_gap, spec.params, clean=True)(pts)
        m = np.abs(vectorize(pair.mu, spec.params)(pts)) + np.abs(vectorize(pair.mutilde, spec.params)(pts))
        s2 = vectorize(pair.sigma, spec.params)(pts) ** 2
        t2 = vectorize(pair.sigmatilde, spec.params)(pts) ** 2
    drift_eq = np.all(np.abs(g) <= REL_EQ * m)
    return bool(drift_eq and np.all(_sq_equal(s2, t2)))


def _endpoint_nonseparating(pair: SdePair, an: ScaleAnalysis, side: str):
    e = "l" if side == LEFT else "r"
    s_lim = an.s_limit(ORIGINAL, side)
    st_lim = an.s_limit(TILDE, side)
    g_o = an.weighted(ORIGINAL, side, separation_weight(pair))
    g_t = an.weighted(TILDE, side, separation_weight(pair, tilde=True))
    via_s = all_(from_verdict(s_lim), from_verdict(g_o))
    via_st = all_(from_verdict(st_lim), from_verdict(g_t))
    diags = []
    if via_s.known and via_st.known and via_s is not via_st:
        diags.append(f"non-separation at {e}: s-route {via_s} vs s~-route {via_st}")
        ok = Tri.UNKNOWN
    else:
        ok = via_s if via_s.known else via_st
    y, yt = an.feller(ORIGINAL, side).exits, an.feller(TILDE, side).exits
    if y.known and yt.known and y is not yt:
        if ok is Tri.YES:
            diags.append(f"non-separation at {e} contradicts differing exit behaviour")
        ok = Tri.NO
    evidence = [(f"nonsep_s[{e}]", via_s), (f"nonsep_stilde[{e}]", via_st),
                (f"exit[P,{e}]", y), (f"exit[Ptilde,{e}]", yt)]
    return ok, evidence, diags


def separating_set(pair: SdePair, options: AnalysisOptions = DEFAULT_OPTIONS,
                   analysis: ScaleAnalysis | None = None) -> SeparatingSetReport:
    spec = pair.spec
    x0 = spec.x0
    if laws_identical(pair, options.depth):
        return SeparatingSetReport((), Tri.NO, Tri.NO, None, None, identical=True,
                                   evidence=(("identical", Tri.YES),))
    pts = _check_points(spec, options.depth)
    intervals = _merge(pts, *_interior_flags(pair, pts))
    x0_sep = any(a <= x0 <= b for a, b in intervals)
    an = analysis or ScaleAnalysis(spec, options)
    ends, evidence, diags = {}, [], []
    for side in (LEFT, RIGHT):
        inner = any(a <= x0 for a, _ in intervals) if side == LEFT else any(b >= x0 for _, b in intervals)
        if inner:
            ends[side] = Tri.YES
            evidence.append((f"interior[{side}]", Tri.YES))
            continue
        ok, ev, dg = _endpoint_nonseparating(pair, an, side)
        ends[side] = ~ok
        evidence += ev
        diags += dg
    left_pts = [min(b, x0) for a, b in intervals if a <= x0]
    right_pts = [max(a, x0) for a, b in intervals if b >= x0]
    alpha = max(left_pts) if left_pts else (spec.l if ends[LEFT] is Tri.YES else None)
    beta = min(right_pts) if right_pts else (spec.r if ends[RIGHT] is Tri.YES else None)
    return SeparatingSetReport(intervals, ends[LEFT], ends[RIGHT], alpha, beta, False, x0_sep,
                               tuple(evidence), tuple(diags))


# ---------------------------------------------------------------- arrangement

@dataclass(frozen=True)
class ArrangementReport:
    """Arrangement flags of P~ relative to P (and the reverse one-sided flags)."""

    equivalent: Tri          # P~ ~ P
    tilde_ac: Tri            # P~ << P
    loc_equivalent: Tri      # P~ loc~ P
    tilde_loc_ac: Tri        # P~ loc<< P
    singular: Tri            # P~ _|_ P
    singular_at_0: Tri       # P~_0 _|_ P_0
    ac: Tri                  # P << P~
    loc_ac: Tri              # P loc<< P~
    separating: SeparatingSetReport | None = None
    trace: tuple = ()
    diagnostics: tuple = ()

    def swapped(self) -> "ArrangementReport":
        return replace(self, tilde_ac=self.ac, ac=self.tilde_ac,
                       tilde_loc_ac=self.loc_ac, loc_ac=self.tilde_loc_ac)

    def flags(self) -> dict:
        return {"P~ ~ P": self.equivalent, "P~ << P": self.tilde_ac, "P << P~": self.ac,
                "P~ loc~ P": self.loc_equivalent, "P~ loc<< P": self.tilde_loc_ac,
                "P loc<< P~": self.loc_ac, "P~ _|_ P": self.singular,
                "P~_0 _|_ P_0": self.singular_at_0}

    def summary(self) -> str:
        if self.equivalent is Tri.YES:
            return "P~ ∼ P"
        if self.singular_at_0 is Tri.YES:
            return "P~_0 ⊥ P_0"
        if self.loc_equivalent is Tri.YES:
            return "P~ loc∼ P"
        if self.singular is Tri.YES:
            return "P~ ⊥ P"
        return "undetermined" if Tri.UNKNOWN in self.flags().values() else "mixed"


def _law_structure(an: ScaleAnalysis, which: str) -> dict:
    fin = {side: from_verdict(an.s_limit(which, side)) for side in (LEFT, RIGHT)}
    osc = all_(~fin[LEFT], ~fin[RIGHT])
    return {side: {"s_finite": fin[side], "reach": any_(fin[side], osc),
                   "exit": an.feller(which, side).exits} for side in (LEFT, RIGHT)}


def _ac(sep: SeparatingSetReport, law: dict, key: str) -> Tri:
    if sep.interior_separating:
        return Tri.NO
    return all_(*(implies(sep.endpoint(side), ~law[side][key]) for side in (LEFT, RIGHT)))


def _singular(sep: SeparatingSetReport, law: dict, x0: float) -> Tri:
    if sep.x0_separating:
        return Tri.YES
    escape = [all_(Tri.of(not sep.side_interior(side, x0)), ~sep.endpoint(side), law[side]["s_finite"])
              for side in (LEFT, RIGHT)]
    return all_(~sep.is_empty, ~any_(*escape))


def mutual_arrangement(pair: SdePair, options: AnalysisOptions = DEFAULT_OPTIONS,
                       analysis: ScaleAnalysis | None = None) -> ArrangementReport:
    an = analysis or ScaleAnalysis(pair.spec, options)
    sep = separating_set(pair, options, an)
    if sep.identical:
        y = Tri.YES
        return ArrangementReport(y, y, y, y, Tri.NO, Tri.NO, y, y, sep, ("identical laws: S = delta",))
    trace = [f"D interior: {list(sep.interior_separating) or 'none'}",
             f"D endpoints: l {sep.left_endpoint_separating}, r {sep.right_endpoint_separating}"]
    if sep.x0_separating:
        n = Tri.NO
        trace.append("x0 is separating: S = 0")
        return ArrangementReport(n, n, n, n, Tri.YES, Tri.YES, n, n, sep, tuple(trace), sep.diagnostics)
    if sep.interior_separating:
        trace.append("interior separating point is hit with positive probability under both laws")
    P = _law_structure(an, ORIGINAL)
    Pt = _law_structure(an, TILDE)
    for name, law in (("P", P), ("Ptilde", Pt)):
        for side in (LEFT, RIGHT):
            e = "l" if side == LEFT else "r"
            trace.append(f"reach[{name},{e}] = {law[side]['reach']}, exit[{name},{e}] = {law[side]['exit']}")
    tilde_ac = _ac(sep, Pt, "reach")
    ac = _ac(sep, P, "reach")
    tilde_loc = _ac(sep, Pt, "exit")
    loc = _ac(sep, P, "exit")
    x0 = pair.spec.x0
    sing_p, sing_t = _singular(sep, P, x0), _singular(sep, Pt, x0)
    diags = list(sep.diagnostics)
    if sing_p.known and sing_t.known and sing_p is not sing_t:
        diags.append(f"singularity under P ({sing_p}) and P~ ({sing_t}) disagree")
        singular = Tri.UNKNOWN
    else:
        singular = sing_p if sing_p.known else sing_t
    return ArrangementReport(all_(tilde_ac, ac), tilde_ac, all_(tilde_loc, loc), tilde_loc,
                             singular, Tri.NO, ac, loc, sep, tuple(trace), tuple(diags))


def arrangement_of_exponential(spec: ProblemSpec, options: AnalysisOptions = DEFAULT_OPTIONS
                               ) -> ArrangementReport:
    """Arrangement of the laws of Y and of its auxiliary diffusion."""
    return mutual_arrangement(exponential_pair(spec), options)


def hitting_bounds(sep: SeparatingSetReport, spec: ProblemSpec) -> tuple[float, float]:
    """The bounds the separating time is the hitting time of (endpoints when free)."""
    lo = sep.alpha if sep.alpha is not None else spec.l
    hi = sep.beta if sep.beta is not None else spec.r
    return (lo if not math.isnan(lo) else spec.l, hi if not math.isnan(hi) else spec.r)

"""Adaptive Gauss-Kronrod quadrature and ladder probes for improper integrals.

Every improper integral is reduced to a ladder of proper integrals over
[m_k, m_{k+1}] with m_k approaching the endpoint geometrically (in the
arctan coordinate for infinite endpoints, in the distance for finite ones).
The sequence of rung integrals is then classified by `classify_increments`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Kronrod 15-point / Gauss 7-point pair (QUADPACK qk15 constants).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
WEIGHTS_K = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
WEIGHTS_G = np.zeros(15)
for _i, _j in ((1, 0), (3, 1), (5, 2)):
    WEIGHTS_G[_i] = WEIGHTS_G[14 - _i] = _WG[_j]
WEIGHTS_G[7] = _WG[3]

DEFAULT_TOL = 1e-9
DEFAULT_DEPTH = 60

# ladder classification thresholds
GROWTH_FACTOR = 1.05
GROWTH_RUNGS = 6
LEVEL_RTOL = 1e-4
LOG_DECAY_MARGIN = 1.02


class EvaluationError(ValueError):
    """The integrand raised at an interior abscissa."""

    def __init__(self, x: float, cause: Exception):
        super().__init__(f"integrand failed at x={x!r}: {cause}")
        self.x = x
        self.cause = cause


@dataclass(frozen=True)
class IntegralVerdict:
    """Finite(value, abs_err) | Divergent | Inconclusive, with provenance."""

    kind: str
    value: float | None = None
    abs_err: float | None = None
    route: str = "numeric"
    note: str = ""

    FINITE = "finite"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def finite(cls, value=None, abs_err=None, route="numeric", note=""):
        return cls(cls.FINITE, value, abs_err, route, note)

    @classmethod
    def divergent(cls, route="numeric", note=""):
        return cls(cls.DIVERGENT, None, None, route, note)

    @classmethod
    def inconclusive(cls, route="numeric", note=""):
        return cls(cls.INCONCLUSIVE, None, None, route, note)

    @property
    def is_finite(self) -> bool:
        return self.kind == self.FINITE

    @property
    def is_divergent(self) -> bool:
        return self.kind == self.DIVERGENT

    @property
    def is_conclusive(self) -> bool:
        return self.kind != self.INCONCLUSIVE

    def __str__(self) -> str:
        if self.is_finite:
            if self.value is None:
                body = "Finite"
            else:
                body = f"Finite({self.value:.12g} +/- {self.abs_err:.2g})"
        elif self.is_divergent:
            body = "Divergent"
        else:
            body = "Inconclusive"
        tail = f"; {self.note}" if self.note else ""
        return f"{body} [{self.route}{tail}]"


def _as_vectorized(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(x: np.ndarray) -> np.ndarray:
        try:
            with np.errstate(all="ignore"):
                y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except EvaluationError:
            raise
        except Exception:
            pass
        out = np.empty_like(x)
        for i, xi in enumerate(x.flat):
            try:
                with np.errstate(all="ignore"):
                    out.flat[i] = float(f(float(xi)))
            except Exception as exc:  # noqa: BLE001 - reported with abscissa
                raise EvaluationError(float(xi), exc) from exc
        return out
    return g


def _panels(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    y = f(x.ravel()).reshape(x.shape)
    ok = np.isfinite(y)
    bad = ~ok.all(axis=1)
    y = np.where(ok, y, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        k = half * (y @ WEIGHTS_K)
        g = half * (y @ WEIGHTS_G)
        err = np.abs(k - g)
    err[bad] = np.inf
    return k, err


def gauss_kronrod(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL,
                  rtol: float = 0.0, max_panels: int = 4000):
    """Adaptive G7-K15 on the proper interval [a, b].

    Returns (value, error estimate, converged).  Panels whose nodes produce
    non-finite values are forced to split, which isolates integrable
    singularities at panel boundaries.
    """
    f = _as_vectorized(f)
    if b == a:
        return 0.0, 0.0, True
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    val, err = _panels(f, lo, hi)
    while True:
        total = float(val.sum())
        total_err = float(err.sum())
        target = max(tol, rtol * abs(total))
        if total_err <= target:
            return sign * total, total_err, True
        if lo.size >= max_panels:
            return sign * total, total_err, False
        share = target / lo.size
        pick = err > share
        pick[np.argmax(err)] = True
        width = hi - lo
        scale = np.maximum(np.abs(lo), np.abs(hi))
        splittable = width > 64 * np.finfo(float).eps * np.maximum(scale, 1e-300)
        pick &= splittable
        if not pick.any():
            return sign * total, total_err, False
        m = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], m])
        new_hi = np.concatenate([m, hi[pick]])
        v2, e2 = _panels(f, new_lo, new_hi)
        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], v2])
        err = np.concatenate([err[keep], e2])


def ladder_points(start: float, endpoint: float, depth: int = DEFAULT_DEPTH) -> np.ndarray:
    """Rungs m_0=start, m_1, ... approaching `endpoint` geometrically.

    Infinite endpoints halve the arctan distance per rung; finite endpoints
    halve the Euclidean distance.  Rungs that are not distinct in floating
    point are dropped, so the ladder may be shorter than `depth`.
    """
    k = np.arange(depth + 1, dtype=float)
    if math.isinf(endpoint):
        # cot of the remaining arctan distance keeps full relative precision
        sgn = 1.0 if endpoint > 0 else -1.0
        eps = (math.pi / 2 - sgn * math.atan(start)) * 0.5 ** k
        pts = sgn / np.tan(eps)
    else:
        pts = endpoint - (endpoint - start) * 0.5 ** k
    pts[0] = start
    direction = 1.0 if endpoint > start else -1.0
    out = [pts[0]]
    for p in pts[1:]:
        if not np.isfinite(p) or direction * (p - out[-1]) <= 0 or p == endpoint:
            break
        out.append(p)
    return np.array(out)


def ladder_positions(points: np.ndarray, endpoint: float) -> np.ndarray:
    """Logarithmic position (base 2) of each rung midpoint relative to the endpoint."""
    mids = 0.5 * (points[:-1] + points[1:])
    with np.errstate(all="ignore"):
        if math.isinf(endpoint):
            return np.log2(np.maximum(np.abs(mids), 1e-300))
        return np.log2(1.0 / np.maximum(np.abs(endpoint - mids), 1e-300))


@dataclass(frozen=True)
class LadderFit:
    """Outcome of classifying a sequence of rung integrals."""

    kind: str
    value: float | None
    abs_err: float | None
    note: str
    rungs: int


def classify_increments(inc: Sequence[float], positions: Sequence[float] | None = None,
                        tol: float = DEFAULT_TOL, rtol: float = 0.0,
                        errors: Sequence[float] | None = None) -> LadderFit:
    """Classify the partial sums of rung integrals as finite, divergent or neither.

    Finite: an Aitken geometric-tail extrapolation is stable within the
    tolerance over three consecutive rungs.
    Divergent: partial sums keep growing by >= 5% per rung over the final six
    rungs with no deceleration; or the final six increments level off (net
    decay below LEVEL_RTOL); or they decay like a power of the log-position
    with exponent <= 1.02 (the 1/(x log x) regime); or they overflow after
    growing.
    Otherwise Inconclusive.
    """
    d = np.asarray(inc, dtype=float)
    n_all = d.size
    kappa = (np.asarray(positions, dtype=float) if positions is not None
             else np.arange(1, n_all + 1, dtype=float))
    errs = (np.asarray(errors, dtype=float) if errors is not None
            else np.zeros(n_all))
    bad = ~np.isfinite(d)
    overflow = False
    if bad.any():
        j = int(np.argmax(bad))
        overflow = bool(np.isinf(d[j]) or np.isnan(d[j]))
        d, kappa, errs = d[:j], kappa[:j], errs[:j]
    n = d.size
    if n == 0:
        return LadderFit(IntegralVerdict.INCONCLUSIVE, None, None,
                         "no finite rung integrals", 0)
    S = np.cumsum(d)
    quad_err = float(np.sum(errs))
    # no tolerance below the rounding floor of the partial sums
    floor = 16 * np.finfo(float).eps * float(np.sum(np.abs(d)))

    # finite: stable Aitken limit
    limits = np.full(n, np.nan)
    for k in range(1, n):
        if d[k] == 0.0 and d[k - 1] == 0.0:
            limits[k] = S[k]
            continue
        if d[k - 1] == 0.0:
            continue
        r = d[k] / d[k - 1]
        if abs(r) < 1.0 - 1e-6:
            limits[k] = S[k] + d[k] * r / (1.0 - r)
    for k in range(4, n):
        w = limits[k - 2:k + 1]
        if not np.isfinite(w).all():
            continue
        spread = max(abs(w[2] - w[1]), abs(w[1] - w[0]))
        est = spread + quad_err
        if est <= max(tol, rtol * abs(w[2]), floor):
            return LadderFit(IntegralVerdict.FINITE, float(w[2]), float(est),
                             f"tail extrapolation stable at rung {k}", k + 1)

    mag = np.abs(d)
    if overflow and n >= 2 and np.all(np.diff(mag[-3:]) >= 0):
        return LadderFit(IntegralVerdict.DIVERGENT, None, None,
                         "rung integrals overflow after growing", n)
    if n >= GROWTH_RUNGS + 1 and S[-GROWTH_RUNGS - 1] > 0:
        tail = S[-GROWTH_RUNGS - 1:]
        grows = np.all(tail[1:] >= GROWTH_FACTOR * tail[:-1])
        steady = np.all(np.diff(mag[-GROWTH_RUNGS:]) >= 0)
        if grows and steady:
            return LadderFit(IntegralVerdict.DIVERGENT, None, None,
                             "partial sums grow >= 5% per rung without deceleration", n)
    if n >= GROWTH_RUNGS and np.all(mag[-GROWTH_RUNGS:] > 0):
        last = mag[-GROWTH_RUNGS:]
        if last.min() >= last[0] * (1.0 - LEVEL_RTOL):
            return LadderFit(IntegralVerdict.DIVERGENT, None, None,
                             "rung integrals do not decrease", n)
        # power-of-log decay: log d_k ~ -beta log kappa_k
        kap = kappa[-GROWTH_RUNGS:]
        if np.all(kap > 1.0) and np.all(np.diff(last) < 0):
            dl = np.diff(np.log(last))
            km = 0.5 * (kap[1:] + kap[:-1])
            geo = dl
            powr = dl * km
            cv_geo = np.std(geo) / abs(np.mean(geo))
            cv_pow = np.std(powr) / abs(np.mean(powr))
            beta = -float(np.mean(powr))
            if cv_pow < cv_geo and beta <= LOG_DECAY_MARGIN:
                return LadderFit(IntegralVerdict.DIVERGENT, None, None,
                                 f"rung integrals decay like log-position^-{beta:.3f}", n)
    return LadderFit(IntegralVerdict.INCONCLUSIVE, None, None,
                     f"no decision after {n} rungs", n)


def _verdict(fit: LadderFit, route: str = "numeric") -> IntegralVerdict:
    if fit.kind == IntegralVerdict.FINITE:
        return IntegralVerdict.finite(fit.value, fit.abs_err, route, fit.note)
    if fit.kind == IntegralVerdict.DIVERGENT:
        return IntegralVerdict.divergent(route, fit.note)
    return IntegralVerdict.inconclusive(route, fit.note)


def _rung_integrals(f, points: np.ndarray, tol: float):
    vals = np.empty(points.size - 1)
    errs = np.empty(points.size - 1)
    for k in range(points.size - 1):
        a, b = points[k], points[k + 1]
        v, e, _ = gauss_kronrod(f, min(a, b), max(a, b), tol=tol, rtol=1e-14)
        vals[k], errs[k] = v, e
        if not np.isfinite(v):
            vals[k + 1:] = np.nan
            errs[k + 1:] = np.nan
            break
    return vals, errs


def _tail_fit(f, start: float, endpoint: float, tol: float, depth: int) -> LadderFit:
    pts = ladder_points(start, endpoint, depth)
    if pts.size < 2:
        return LadderFit(IntegralVerdict.INCONCLUSIVE, None, None, "degenerate ladder", 0)
    vals, errs = _rung_integrals(f, pts, tol * 1e-3)
    return classify_increments(vals, ladder_positions(pts, endpoint), tol=tol, errors=errs)


def _split_point(lo: float, hi: float) -> float:
    if math.isinf(lo) or math.isinf(hi):
        return math.tan(0.5 * (math.atan(lo) + math.atan(hi)))
    return 0.5 * (lo + hi)


def integrate(f: Callable, lo: float, hi: float, tol: float = DEFAULT_TOL,
              depth: int = DEFAULT_DEPTH) -> IntegralVerdict:
    """Integral of f over the open interval (lo, hi), endpoints possibly infinite."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    g = _as_vectorized(f)
    mid = _split_point(lo, hi)
    right = _tail_fit(g, mid, hi, tol / 2, depth)
    left = _tail_fit(g, mid, lo, tol / 2, depth)
    kinds = {left.kind, right.kind}
    if IntegralVerdict.DIVERGENT in kinds:
        which = "upper" if right.kind == IntegralVerdict.DIVERGENT else "lower"
        note = (right if which == "upper" else left).note
        return IntegralVerdict.divergent(note=f"{which} end: {note}")
    if IntegralVerdict.INCONCLUSIVE in kinds:
        return IntegralVerdict.inconclusive(note=f"lower: {left.note}; upper: {right.note}")
    value = left.value + right.value
    err = left.abs_err + right.abs_err
    if err > max(tol, 32 * np.finfo(float).eps * abs(value)):
        return IntegralVerdict.inconclusive(note=f"error {err:.2g} above tolerance")
    return IntegralVerdict.finite(value, err, note="ladder to both ends")


def probe_tail(f: Callable, endpoint: float, side: str = "right", start: float | None = None,
               tol: float = DEFAULT_TOL, depth: int = DEFAULT_DEPTH) -> IntegralVerdict:
    """Finiteness of the integral of f over a one-sided neighbourhood of `endpoint`.

    side="right" means the endpoint is approached from below (x -> r-),
    side="left" from above (x -> l+).
    """
    side = side.lower()
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if start is None:
        if math.isinf(endpoint):
            start = 1.0 if endpoint > 0 else -1.0
        else:
            start = endpoint - 1.0 if side == "right" else endpoint + 1.0
    if side == "right" and not start < endpoint:
        raise ValueError("start must lie below a right endpoint")
    if side == "left" and not start > endpoint:
        raise ValueError("start must lie above a left endpoint")
    fit = _tail_fit(_as_vectorized(f), start, endpoint, tol, depth)
    v = _verdict(fit)
    if v.is_finite and v.abs_err > max(tol, 32 * np.finfo(float).eps * abs(v.value)):
        return IntegralVerdict.inconclusive(note="tail not resolved to tolerance")
    return v

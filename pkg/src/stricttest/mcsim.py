"""Monte-Carlo oracle for E Z_T and the occupation-times identity.

Paths are simulated by Euler-Maruyama and absorbed at truncation levels
l_n < x0 < r_n that stand in for the endpoints of J.  Paths are grouped in
blocks; block k draws from Philox seeded with the k-th child of the master
SeedSequence, so results do not depend on how blocks are scheduled.
"""
from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .classify import endpoint_report, goodness_weight
from .coeffspec import LEFT, RIGHT, Add, Mul, ProblemSpec, vectorize
from .scale import DEFAULT_OPTIONS, ORIGINAL, AnalysisOptions, ScaleAnalysis
from .tri import Tri


DIRECT = "direct"
AUX = "auxiliary"
BOTH = "both"
ESTIMATORS = (DIRECT, AUX, BOTH)
BLOCK = 8192
LOG_MAX = math.log(np.finfo(float).max)


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    horizon: float = 1.0
    step: float = 1e-3
    paths: int = 100_000
    lower: float | None = None
    upper: float | None = None
    seed: int = 20240601
    estimator: str = DIRECT
    quantile: float = 0.999
    block: int = BLOCK
    threads: int | None = None

    def __post_init__(self):
        if not (self.horizon > 0 and self.step > 0 and self.step <= self.horizon):
            raise ValueError("need 0 < step <= horizon")
        if self.paths <= 0 or self.block <= 0:
            raise ValueError("paths and block size must be positive")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")
        if not 0.0 < self.quantile < 1.0:
            raise ValueError("truncation quantile must lie in (0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.step)))

    def levels(self, spec: ProblemSpec) -> tuple[float, float]:
        lo = self.lower if self.lower is not None else truncation_level(spec.l, spec.x0, self.quantile)
        hi = self.upper if self.upper is not None else truncation_level(spec.r, spec.x0, self.quantile)
        if not spec.l < lo < spec.x0 < hi < spec.r:
            raise ValueError(f"truncation levels ({lo}, {hi}) must satisfy l < l_n < x0 < r_n < r")
        return lo, hi

    def worker_count(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        env = os.environ.get("STRICTTEST_THREADS")
        return max(1, int(env)) if env else 1


def truncation_level(endpoint: float, x0: float, quantile: float) -> float:
    """Point at the given fraction of the arctan distance from x0 to the endpoint."""
    a, e = math.atan(x0), math.atan(endpoint)
    return math.tan(a + quantile * (e - a))


@dataclass
class EstimateReport:
    estimator: str
    estimate: float
    se: float
    paths: int
    absorbed_left: int
    absorbed_right: int
    zero_mass: int
    levels: tuple
    seed: int
    seconds: float = 0.0
    rows: list = field(default_factory=list, repr=False)
    notes: tuple = ()

    @property
    def supermartingale_ok(self) -> bool:
        return self.estimate <= 1.0 + 5.0 * self.se

    def z_score(self, target: float = 1.0) -> float:
        return (self.estimate - target) / self.se if self.se > 0 else (0.0 if self.estimate == target else math.inf)


@dataclass
class _Block:
    side: np.ndarray        # 0 alive, -1 absorbed low, +1 absorbed high
    t_abs: np.ndarray
    logz: np.ndarray | None
    lhs: np.ndarray | None
    rhs: np.ndarray | None


def _block_rngs(seed: int, n_blocks: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def _run_block(n: int, rng: np.random.Generator, x0: float, lo: float, hi: float, h: float, steps: int,
               drift: Callable, sigma: Callable, b: Callable | None, occupation: float | None,
               occ_weight: Callable | None = None) -> _Block:
    y = np.full(n, x0)
    alive = np.ones(n, dtype=bool)
    side = np.zeros(n, dtype=np.int8)
    t_abs = np.full(n, np.nan)
    logz = np.zeros(n) if b is not None else None
    lhs = np.zeros(n) if occupation else None
    rhs = np.zeros(n) if occupation else None
    sq = math.sqrt(h)
    with np.errstate(all="ignore"):
        for k in range(steps):
            dw = rng.standard_normal(n) * sq
            sg = sigma(y)
            if b is not None:
                bv = b(y)
                logz = np.where(alive, logz + bv * dw - 0.5 * bv * bv * h, logz)
            if occupation:
                # binned occupation density: time in the bin of y, weighted at the bin centre
                centre = x0 + (np.floor((y - x0) / occupation) + 0.5) * occupation
                lhs += np.where(alive, occ_weight(y) * sg * sg * h, 0.0)
                rhs += np.where(alive, occ_weight(centre) * sigma(centre) ** 2 * h, 0.0)
            ynew = y + drift(y) * h + sg * dw
            ynew = np.where(np.isnan(ynew), y, ynew)
            hit_lo = alive & (ynew <= lo)
            hit_hi = alive & (ynew >= hi)
            ynew = np.where(hit_lo, lo, np.where(hit_hi, hi, ynew))
            newly = hit_lo | hit_hi
            side[hit_lo] = -1
            side[hit_hi] = 1
            t_abs[newly] = (k + 1) * h
            y = np.where(alive, ynew, y)
            alive &= ~newly
            if not alive.any():
                break
    return _Block(side, t_abs, logz, lhs, rhs)


def _blocks(cfg: SimConfig, job: Callable[[int, np.random.Generator], _Block]) -> list[_Block]:
    n_blocks = -(-cfg.paths // cfg.block)
    sizes = [min(cfg.block, cfg.paths - i * cfg.block) for i in range(n_blocks)]
    rngs = _block_rngs(cfg.seed, n_blocks)
    workers = cfg.worker_count()
    if workers == 1:
        return [job(n, g) for n, g in zip(sizes, rngs)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(job, sizes, rngs))


def _cat(blocks, name):
    return np.concatenate([getattr(bl, name) for bl in blocks])


def _mean_se(v: np.ndarray) -> tuple[float, float]:
    n = v.size
    m = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return m, se


def _side_name(code: int) -> str:
    return {-1: "left", 1: "right"}.get(int(code), "none")


def zero_at_absorption(spec: ProblemSpec, options: AnalysisOptions = DEFAULT_OPTIONS,
                       analysis: ScaleAnalysis | None = None) -> dict:
    """Endpoints where an exit of Y comes with an infinite b^2 integral (Z is set to 0)."""
    an = analysis or ScaleAnalysis(spec, options)
    out = {}
    for side in (LEFT, RIGHT):
        exits = an.feller(ORIGINAL, side).exits
        w = an.weighted(ORIGINAL, side, goodness_weight(spec))
        if exits is Tri.UNKNOWN or (exits is Tri.YES and not w.is_conclusive):
            raise SimulationError(f"cannot decide the absorption rule at the {side} endpoint")
        out[side] = exits is Tri.YES and w.is_divergent
    return out


def simulate_EZ(spec: ProblemSpec, cfg: SimConfig, options: AnalysisOptions = DEFAULT_OPTIONS,
                analysis: ScaleAnalysis | None = None, keep_rows: bool = False) -> EstimateReport:
    """Direct estimator of E Z_T from paths of Y."""
    t0 = time.perf_counter()
    lo, hi = cfg.levels(spec)
    zero = zero_at_absorption(spec, options, analysis)
    drift, sigma, b = spec.fn("mu"), spec.fn("sigma"), spec.fn("b")

    def job(n, rng):
        return _run_block(n, rng, spec.x0, lo, hi, cfg.step, cfg.n_steps, drift, sigma, b, None)

    blocks = _blocks(cfg, job)
    side, t_abs, logz = _cat(blocks, "side"), _cat(blocks, "t_abs"), _cat(blocks, "logz")
    kill = ((side == -1) & zero[LEFT]) | ((side == 1) & zero[RIGHT])
    logz = np.where(kill, -np.inf, logz)
    if np.any(np.isnan(logz)):
        raise SimulationError(f"log Z is not a number on path {int(np.argmax(np.isnan(logz)))}")
    if np.any(logz > LOG_MAX):
        raise SimulationError(f"Z overflows on path {int(np.argmax(logz > LOG_MAX))}")
    z = np.exp(logz)
    est, se = _mean_se(z)
    rows = []
    if keep_rows:
        rows = [(i, _side_name(s), "" if np.isnan(t) else repr(float(t)), repr(float(v)))
                for i, (s, t, v) in enumerate(zip(side, t_abs, z))]
    return EstimateReport(DIRECT, est, se, cfg.paths, int((side == -1).sum()), int((side == 1).sum()),
                          int(kill.sum()), (lo, hi), cfg.seed, time.perf_counter() - t0, rows)


def killing_sides(spec: ProblemSpec, options: AnalysisOptions = DEFAULT_OPTIONS,
                  analysis: ScaleAnalysis | None = None) -> dict:
    """Endpoints where reaching the truncation level counts as loss of mass.

    That is the case exactly when Y~ exits there and the endpoint is bad.
    """
    an = analysis or ScaleAnalysis(spec, options)
    out = {}
    for side in (LEFT, RIGHT):
        rep = endpoint_report(spec, side, options, an)
        if rep.ytilde_exits is Tri.NO:
            out[side] = False
            continue
        if not (rep.ytilde_exits.known and rep.good.known):
            raise SimulationError(f"goodness or exit of Y~ at the {side} endpoint is undetermined")
        out[side] = rep.ytilde_exits is Tri.YES and rep.good is Tri.NO
    return out


def simulate_survival(spec: ProblemSpec, cfg: SimConfig, options: AnalysisOptions = DEFAULT_OPTIONS,
                      analysis: ScaleAnalysis | None = None, keep_rows: bool = False) -> EstimateReport:
    """Estimate P~(Y~ has not exited at a bad endpoint by T) from paths of Y~."""
    t0 = time.perf_counter()
    lo, hi = cfg.levels(spec)
    kill = killing_sides(spec, options, analysis)
    drift = vectorize(Add(spec.mu, Mul(spec.b, spec.sigma)), spec.params)
    sigma = spec.fn("sigma")

    def job(n, rng):
        return _run_block(n, rng, spec.x0, lo, hi, cfg.step, cfg.n_steps, drift, sigma, None, None)

    blocks = _blocks(cfg, job)
    side = _cat(blocks, "side")
    dead = ((side == -1) & kill[LEFT]) | ((side == 1) & kill[RIGHT])
    est, se = _mean_se((~dead).astype(float))
    rows = []
    if keep_rows:
        rows = [(i, int(not d), _side_name(s)) for i, (d, s) in enumerate(zip(dead, side))]
    return EstimateReport(AUX, est, se, cfg.paths, int((side == -1).sum()), int((side == 1).sum()),
                          int(dead.sum()), (lo, hi), cfg.seed, time.perf_counter() - t0, rows)


def simulate(spec: ProblemSpec, cfg: SimConfig, options: AnalysisOptions = DEFAULT_OPTIONS,
             keep_rows: bool = False) -> list[EstimateReport]:
    an = ScaleAnalysis(spec, options)
    out = []
    if cfg.estimator in (DIRECT, BOTH):
        out.append(simulate_EZ(spec, cfg, options, an, keep_rows))
    if cfg.estimator in (AUX, BOTH):
        out.append(simulate_survival(spec, cfg, options, an, keep_rows))
    return out


def dual_agreement(a: EstimateReport, b: EstimateReport, k: float = 3.0) -> bool:
    return abs(a.estimate - b.estimate) <= k * math.hypot(a.se, b.se)


def truncation_ladder(spec: ProblemSpec, cfg: SimConfig, quantiles=(0.99, 0.999, 0.9999),
                      options: AnalysisOptions = DEFAULT_OPTIONS) -> tuple[list[EstimateReport], bool]:
    """Direct estimates with levels pushed outward; True when no estimate rises by > 3 SE."""
    an = ScaleAnalysis(spec, options)
    reps = [simulate_EZ(spec, replace(cfg, quantile=q, lower=None, upper=None), options, an)
            for q in quantiles]
    ok = all(b.estimate - a.estimate <= 3.0 * math.hypot(a.se, b.se) for a, b in zip(reps, reps[1:]))
    return reps, ok


@dataclass
class OccupationReport:
    median: float
    used: int
    excluded: int
    bin_width: float
    discrepancies: np.ndarray = field(repr=False, default=None)


def occupation_check(spec: ProblemSpec, cfg: SimConfig, bin_width: float | None = None) -> OccupationReport:
    """Compare int b^2(Y) du with the binned occupation-density side, path by path.

    The right side sums (b^2/sigma^2)(y) L(y) dy over bins with
    L(y) = time in bin * sigma^2(y) / width; summing per time step over the
    bin centre of Y gives the same number.  The default width h^(1/4) makes
    the binning error shrink like h^(1/2).
    """
    lo, hi = cfg.levels(spec)
    w = bin_width if bin_width is not None else cfg.step ** 0.25
    drift, sigma = spec.fn("mu"), spec.fn("sigma")
    g = vectorize(Mul(spec.b, spec.b) / Mul(spec.sigma, spec.sigma), spec.params)

    def job(n, rng):
        return _run_block(n, rng, spec.x0, lo, hi, cfg.step, cfg.n_steps, drift, sigma, None, w, g)

    blocks = _blocks(cfg, job)
    side, lhs, rhs = _cat(blocks, "side"), _cat(blocks, "lhs"), _cat(blocks, "rhs")
    keep = (side == 0) & (np.abs(lhs) > 0)
    d = np.abs(lhs[keep] - rhs[keep]) / np.abs(lhs[keep])
    med = float(np.median(d)) if d.size else math.nan
    return OccupationReport(med, int(keep.sum()), int((~keep).sum()), w, d)


DIRECT_COLUMNS = ("path_id", "absorbed_at", "t_absorbed", "Z_T")
AUX_COLUMNS = ("path_id", "survived", "exit_side")


def write_csv(report: EstimateReport, path: str) -> None:
    cols = DIRECT_COLUMNS if report.estimator == DIRECT else AUX_COLUMNS
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(cols)
        wr.writerows(report.rows)

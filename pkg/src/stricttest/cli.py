"""Command-line entry point: classify | bubble | arrangement | sweep | simulate.

Exit codes: 0 conclusive result, 1 input error, 2 undetermined result.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .bubbles import VolModel, bubble_classify, driftless_dichotomy
from .classify import Classification, Verdict, classify_martingale
from .coeffspec import (ConfigSyntaxError, DomainError, ProblemSpec, ValidationError, load_problem)
from .mcsim import DIRECT, ESTIMATORS, SimConfig, SimulationError, dual_agreement, simulate, write_csv
from .quad import DEFAULT_DEPTH, DEFAULT_TOL
from .scale import AnalysisOptions
from .septime import SdePair, exponential_pair, mutual_arrangement
from .tri import Tri

OK, INPUT_ERROR, UNDETERMINED = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunReport:
    command: str
    echo: str
    verdicts: list = field(default_factory=list)      # (label, value, condition ids)
    evidence: list = field(default_factory=list)      # (condition id, verdict text)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    def render(self) -> str:
        out = [f"# {self.command}", self.echo.rstrip(), ""]
        for label, value, cites in self.verdicts:
            out.append(f"{label}: {value}" + (f"    [{cites}]" if cites else ""))
        if self.evidence:
            out.append("")
            out.append("evidence:")
            width = max(len(k) for k, _ in self.evidence)
            out += [f"  {k.ljust(width)}  {v}" for k, v in self.evidence]
        if self.notes:
            out.append("")
            out += [f"note: {n}" for n in self.notes]
        out.append(f"time: {self.seconds:.3f} s")
        return "\n".join(out) + "\n"

    def as_dict(self) -> dict:
        return {"command": self.command, "input": self.echo,
                "verdicts": [{"label": a, "value": str(b), "conditions": c} for a, b, c in self.verdicts],
                "evidence": dict(self.evidence), "notes": self.notes, "seconds": self.seconds}


# ---------------------------------------------------------------- helpers

def _options(args) -> AnalysisOptions:
    return AnalysisOptions(tol=args.tol, depth=args.ladder_depth,
                           use_asymptotics=not args.no_asymptotics, cross_check=args.cross_check)


def _param_overrides(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"--param expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise InputError(f"--param {name}: {val!r} is not a number") from None
    return out


def _load(args) -> ProblemSpec:
    spec = load_problem(args.config)
    over = _param_overrides(getattr(args, "param", None))
    return spec.with_params(**over) if over else spec


def _cond_text(conds, keys) -> str:
    d = dict(conds)
    return " ".join(f"({k})={d[k]}" for k in keys if k in d)


def classification_lines(c: Classification) -> list:
    mart_keys, ui_keys = "abcd", "ABCD"
    return [("martingale on every [0,T]", c.martingale_all_T, _cond_text(c.conditions, mart_keys)),
            ("uniformly integrable", c.ui_martingale, _cond_text(c.conditions, ui_keys)),
            ("verdict", c.verdict, "fired: " + (",".join(sorted(c.triggered_conditions)) or "none"))]


def classification_evidence(c: Classification) -> list:
    ev = []
    for rep in c.endpoint_reports:
        e = "l" if rep.endpoint == "left" else "r"
        ev.append((f"good[{e}]", str(rep.good)))
        ev.append((f"exit[Y,{e}]", str(rep.y_exits)))
        ev.append((f"exit[Ytilde,{e}]", str(rep.ytilde_exits)))
        ev += [(k, str(v)) for k, v in rep.evidence]
    return ev


def _emit(report: RunReport, args) -> None:
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps(report.as_dict(), indent=2, default=str) + "\n")
    else:
        sys.stdout.write(report.render())


def _code(*flags) -> int:
    return UNDETERMINED if any(f in (Tri.UNKNOWN, Verdict.UNKNOWN) for f in flags) else OK


# ---------------------------------------------------------------- commands

def cmd_classify(args) -> int:
    t0 = time.perf_counter()
    spec = _load(args)
    c = classify_martingale(spec, _options(args))
    rep = RunReport("classify", spec.to_text(), classification_lines(c), classification_evidence(c),
                    list(c.diagnostics), time.perf_counter() - t0)
    _emit(rep, args)
    return _code(c.verdict)


def cmd_bubble(args) -> int:
    t0 = time.perf_counter()
    spec = _load(args)
    model = VolModel.from_spec(spec)
    b = bubble_classify(model, _options(args))
    lines = [("bubble", b.label, "type3 <- martingale No; type2 <- martingale Yes, UI No"),
             ("type 3", b.type3, ""), ("type 2", b.type2, ""), ("none", b.none, "")]
    lines += classification_lines(b.classification)
    notes = list(b.classification.diagnostics)
    if model.mu0 == 0.0:
        d = driftless_dichotomy(model.sigma, model.x0, model.params,
                                model.sigma_asymptotics.get("right"), _options(args))
        lines.append(("driftless dichotomy", d.label, "x/sigma^2 at inf"))
        if d.label != b.label:
            notes.append("driftless dichotomy disagrees with the full classification")
    rep = RunReport("bubble", spec.to_text(), lines, classification_evidence(b.classification),
                    notes, time.perf_counter() - t0)
    _emit(rep, args)
    return _code(b.type3, b.type2, b.none)


def cmd_arrangement(args) -> int:
    t0 = time.perf_counter()
    spec = _load(args)
    pair = SdePair.from_spec(spec) if spec.is_pair else exponential_pair(spec)
    a = mutual_arrangement(pair, _options(args))
    sep = a.separating
    lines = [("arrangement", a.summary(), "nonsep_s / nonsep_stilde, reach, exit")]
    lines += [(k, v, "") for k, v in a.flags().items()]
    ev = [("D interior", str(list(sep.interior_separating) or "none")),
          ("D left endpoint", str(sep.left_endpoint_separating)),
          ("D right endpoint", str(sep.right_endpoint_separating)),
          ("alpha", str(sep.alpha)), ("beta", str(sep.beta))]
    ev += [(k, str(v)) for k, v in sep.evidence]
    rep = RunReport("arrangement", spec.to_text(), lines, ev, list(a.trace) + list(a.diagnostics),
                    time.perf_counter() - t0)
    _emit(rep, args)
    return _code(*a.flags().values())


def parse_grid(item: str) -> tuple[str, list]:
    name, sep, body = item.partition("=")
    name = name.strip()
    if not sep or not name:
        raise InputError(f"--grid expects name=start:stop:step or name=v1,v2,..., got {item!r}")
    try:
        if ":" in body:
            start, stop, step = (float(v) for v in body.split(":"))
            if step <= 0 or stop < start:
                return name, []
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            vals = [round(start + i * step, 12) for i in range(n)]
        else:
            vals = [float(v) for v in body.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"--grid {name}: cannot parse {body!r}") from None
    return name, [0.0 if v == 0 else v for v in vals]


def _threads() -> int:
    env = os.environ.get("STRICTTEST_THREADS")
    return max(1, int(env)) if env else 1


def sweep_rows(spec: ProblemSpec, grids: list, options: AnalysisOptions) -> list:
    names = [n for n, _ in grids]
    combos = list(itertools.product(*(v for _, v in grids)))

    def run(vals):
        s = spec.with_params(**dict(zip(names, vals)))
        return list(vals) + [classify_martingale(s, options).verdict]

    if _threads() == 1:
        return [run(v) for v in combos]
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        return list(ex.map(run, combos))


def cmd_sweep(args) -> int:
    spec = _load(args)
    grids = [parse_grid(g) for g in args.grid or ()]
    if not grids or any(not v for _, v in grids):
        raise InputError("empty parameter grid")
    unknown = [n for n, _ in grids if n not in spec.params]
    if unknown:
        raise InputError(f"unknown parameter(s): {', '.join(unknown)}")
    rows = sweep_rows(spec, grids, _options(args))
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow([n for n, _ in grids] + ["verdict"])
    for row in rows:
        wr.writerow([repr(v) for v in row[:-1]] + [str(row[-1])])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return UNDETERMINED if any(r[-1] is Verdict.UNKNOWN for r in rows) else OK


def _truncation(text: str | None):
    if not text:
        return None, None
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError("--truncation expects LOW,HIGH") from None
    return lo, hi


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    spec = _load(args)
    lo, hi = _truncation(args.truncation)
    cfg = SimConfig(horizon=args.horizon, step=args.step, paths=args.paths, lower=lo, upper=hi,
                    seed=args.seed, estimator=args.estimator, quantile=args.quantile)
    reps = simulate(spec, cfg, _options(args), keep_rows=bool(args.out))
    lines = []
    for r in reps:
        lines.append((f"E Z_T ({r.estimator})", f"{r.estimate:.6f} +/- {r.se:.6f}",
                      f"absorbed l/r {r.absorbed_left}/{r.absorbed_right}, zero mass {r.zero_mass}"))
        if args.out:
            root, ext = os.path.splitext(args.out)
            write_csv(r, f"{root}_{r.estimator}{ext or '.csv'}" if len(reps) > 1 else args.out)
    if len(reps) == 2:
        lines.append(("estimators agree (3 SE)", Tri.of(dual_agreement(*reps)), "direct vs auxiliary"))
    ev = [("levels", str(reps[0].levels)), ("seed", str(cfg.seed)), ("steps", str(cfg.n_steps))]
    _emit(RunReport("simulate", spec.to_text(), lines, ev, [], time.perf_counter() - t0), args)
    return OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stricttest", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="configuration file")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--ladder-depth", type=int, default=DEFAULT_DEPTH)
        sp.add_argument("--no-asymptotics", action="store_true", help="decide by quadrature only")
        sp.add_argument("--cross-check", action="store_true", help="run quadrature next to the analytic route")
        sp.add_argument("--param", action="append", metavar="NAME=VALUE")
        sp.add_argument("--json", action="store_true")
        return sp

    common(sub.add_parser("classify", help="martingale / UI classification")).set_defaults(fn=cmd_classify)
    common(sub.add_parser("bubble", help="bubble type of a local-volatility model")).set_defaults(fn=cmd_bubble)
    common(sub.add_parser("arrangement", help="mutual arrangement of two laws")).set_defaults(fn=cmd_arrangement)
    sw = common(sub.add_parser("sweep", help="classification over a parameter grid"))
    sw.add_argument("--grid", action="append", metavar="NAME=START:STOP:STEP|V1,V2,...")
    sw.add_argument("--out")
    sw.set_defaults(fn=cmd_sweep)
    sm = common(sub.add_parser("simulate", help="Monte-Carlo estimate of E Z_T"))
    sm.add_argument("--seed", type=int, default=SimConfig.seed)
    sm.add_argument("--paths", type=int, default=SimConfig.paths)
    sm.add_argument("--step", type=float, default=SimConfig.step)
    sm.add_argument("--horizon", type=float, default=SimConfig.horizon)
    sm.add_argument("--truncation", metavar="LOW,HIGH")
    sm.add_argument("--quantile", type=float, default=SimConfig.quantile)
    sm.add_argument("--estimator", choices=ESTIMATORS, default=DIRECT)
    sm.add_argument("--out")
    sm.set_defaults(fn=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.fn(args)
    except (InputError, ConfigSyntaxError, ValidationError, DomainError, SimulationError,
            OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

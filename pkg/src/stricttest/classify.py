"""Endpoint goodness, exit tests and the martingale / UI classification of Z.

Condition identifiers used in reports:

    s[e], stilde[e]                finiteness of s and s~ at endpoint e
    good_s[e], good_stilde[e]      the goodness integral through s or s~
    feller_v[which,e]              the v-functional exit test
    feller_s[which,e]              the equivalent (s(e)-s)/(rho sigma^2) test
    (a)-(d), (A)-(D)               the disjuncts of the martingale and UI criteria
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .coeffspec import LEFT, RIGHT, Div, Expr, Pow, ProblemSpec, Const, is_b_zero_ae
from .scale import (AUXILIARY, DEFAULT_OPTIONS, ORIGINAL, AnalysisOptions, FellerFunctional,
                    ScaleAnalysis)
from .tri import Tri, all_, any_, from_verdict


class Verdict(Enum):
    STRICT_LOCAL = "StrictLocalMartingale"
    MARTINGALE_NOT_UI = "MartingaleNotUI"
    UI = "UniformlyIntegrableMartingale"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


class PreconditionError(ValueError):
    pass


def end_tag(side: str) -> str:
    return "l" if side == LEFT else "r"


def goodness_weight(spec: ProblemSpec) -> Expr:
    return Div(Pow(spec.b, Const(2.0)), Pow(spec.sigma, Const(2.0)))


@dataclass(frozen=True)
class EndpointReport:
    endpoint: str
    y_exits: Tri
    ytilde_exits: Tri
    good: Tri
    s_limit_finite: Tri
    stilde_limit_finite: Tri
    good_via_s: Tri = Tri.UNKNOWN
    good_via_stilde: Tri = Tri.UNKNOWN
    evidence: tuple = ()
    diagnostics: tuple = ()

    def evidence_dict(self) -> dict:
        return dict(self.evidence)


@dataclass(frozen=True)
class Classification:
    martingale_all_T: Tri
    ui_martingale: Tri
    verdict: Verdict
    triggered_conditions: frozenset
    endpoint_reports: tuple
    conditions: tuple = ()
    diagnostics: tuple = ()

    def martingale_on(self, T: float) -> Tri:
        """Martingale property on [0, T]; the criterion does not depend on T."""
        if not T > 0:
            raise ValueError("horizon must be positive")
        return self.martingale_all_T

    @property
    def left(self) -> EndpointReport:
        return self.endpoint_reports[0]

    @property
    def right(self) -> EndpointReport:
        return self.endpoint_reports[1]


def _exit_evidence(f: FellerFunctional, which: str, e: str) -> list:
    return [(f"feller_v[{which},{e}]", f.v_limit), (f"feller_s[{which},{e}]", f.s_route)]


def endpoint_report(spec: ProblemSpec, endpoint: str, options: AnalysisOptions = DEFAULT_OPTIONS,
                    analysis: ScaleAnalysis | None = None) -> EndpointReport:
    an = analysis or ScaleAnalysis(spec, options)
    e = end_tag(endpoint)
    fo = an.feller(ORIGINAL, endpoint)
    fa = an.feller(AUXILIARY, endpoint)
    s_lim = an.s_limit(ORIGINAL, endpoint)
    st_lim = an.s_limit(AUXILIARY, endpoint)
    w = goodness_weight(spec)
    g_o = an.weighted(ORIGINAL, endpoint, w)
    g_a = an.weighted(AUXILIARY, endpoint, w)
    good_s = all_(from_verdict(s_lim), from_verdict(g_o))
    good_st = all_(from_verdict(st_lim), from_verdict(g_a))
    diags = []
    for f, which in ((fo, "Y"), (fa, "Y~")):
        if f.diagnostic:
            diags.append(f"{which} exit at {e}: {f.diagnostic}")
    if good_s.known and good_st.known and good_s is not good_st:
        diags.append(f"goodness at {e}: s-route {good_s} vs s~-route {good_st}")
        good = Tri.UNKNOWN
    else:
        good = good_s if good_s.known else good_st
    y, yt = fo.exits, fa.exits
    if y.known and yt.known and y is not yt:
        if good is Tri.YES:
            diags.append(f"goodness at {e} contradicts differing exit behaviour")
        good = Tri.NO
    evidence = [(f"s[{e}]", s_lim), (f"stilde[{e}]", st_lim),
                (f"good_s[{e}]", g_o), (f"good_stilde[{e}]", g_a)]
    evidence += _exit_evidence(fo, "Y", e) + _exit_evidence(fa, "Ytilde", e)
    return EndpointReport(endpoint, y, yt, good, from_verdict(s_lim), from_verdict(st_lim),
                          good_s, good_st, tuple(evidence), tuple(diags))


def _assemble(mart: Tri, ui: Tri) -> Verdict:
    if mart is Tri.NO:
        return Verdict.STRICT_LOCAL
    if mart is Tri.YES and ui is Tri.YES:
        return Verdict.UI
    if mart is Tri.YES and ui is Tri.NO:
        return Verdict.MARTINGALE_NOT_UI
    return Verdict.UNKNOWN


def classify_martingale(spec: ProblemSpec, options: AnalysisOptions = DEFAULT_OPTIONS,
                        analysis: ScaleAnalysis | None = None) -> Classification:
    an = analysis or ScaleAnalysis(spec, options)
    lrep = endpoint_report(spec, LEFT, options, an)
    rrep = endpoint_report(spec, RIGHT, options, an)
    cond = {
        "a": ~rrep.ytilde_exits,
        "b": rrep.good,
        "c": ~lrep.ytilde_exits,
        "d": lrep.good,
        "A": Tri.of(is_b_zero_ae(spec)),
        "B": all_(rrep.good, ~lrep.stilde_limit_finite),
        "C": all_(lrep.good, ~rrep.stilde_limit_finite),
        "D": all_(lrep.good, rrep.good),
    }
    mart = all_(any_(cond["a"], cond["b"]), any_(cond["c"], cond["d"]))
    ui = any_(cond["A"], cond["B"], cond["C"], cond["D"])
    diags = list(lrep.diagnostics + rrep.diagnostics)
    if ui is Tri.YES and mart is not Tri.YES:
        if mart is Tri.NO:
            diags.append("UI criterion holds while the martingale criterion fails")
        else:
            mart = Tri.YES
    fired = frozenset(k for k, v in cond.items() if v is Tri.YES)
    return Classification(mart, ui, _assemble(mart, ui), fired, (lrep, rrep),
                          tuple(cond.items()), tuple(diags))


def classify_no_exit(spec: ProblemSpec, options: AnalysisOptions = DEFAULT_OPTIONS,
                     analysis: ScaleAnalysis | None = None) -> Classification:
    """Martingale flag for a Y that exits at neither endpoint: Y~ must not exit either."""
    an = analysis or ScaleAnalysis(spec, options)
    fl = {side: (an.feller(ORIGINAL, side), an.feller(AUXILIARY, side)) for side in (LEFT, RIGHT)}
    for side, (fo, _) in fl.items():
        if fo.exits is not Tri.NO:
            state = "exits" if fo.exits is Tri.YES else "may exit"
            raise PreconditionError(f"Y {state} at the {side} endpoint")
    no_exit = {side: ~fa.exits for side, (_, fa) in fl.items()}
    mart = all_(no_exit[LEFT], no_exit[RIGHT])
    fired = frozenset(k for k, side in (("a", RIGHT), ("c", LEFT)) if no_exit[side] is Tri.YES)
    return Classification(mart, Tri.UNKNOWN, _assemble(mart, Tri.UNKNOWN) if mart is Tri.NO
                          else Verdict.UNKNOWN, fired, (), (("a", no_exit[RIGHT]), ("c", no_exit[LEFT])))


def equivalence_checks(spec: ProblemSpec, options: AnalysisOptions = DEFAULT_OPTIONS,
                       analysis: ScaleAnalysis | None = None) -> list[tuple[str, Tri, Tri]]:
    """Pairs of equivalent conditions evaluated independently: (name, first, second)."""
    an = analysis or ScaleAnalysis(spec, options)
    out = []
    for side in (LEFT, RIGHT):
        e = end_tag(side)
        rep = endpoint_report(spec, side, options, an)
        out.append((f"good[{e}]: s vs stilde", rep.good_via_s, rep.good_via_stilde))
        for which in (ORIGINAL, AUXILIARY):
            f = an.feller(which, side)
            out.append((f"exit[{which},{e}]: v vs s", from_verdict(f.v_limit), from_verdict(f.s_route)))
    return out

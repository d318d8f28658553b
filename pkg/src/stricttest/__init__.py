"""Martingale, uniform-integrability and bubble classification of stochastic
exponentials driven by one-dimensional diffusions."""
from .asymp import AsymptoticForm, decide_convergence, integrate_tail
from .bubbles import (BubbleReport, RegionLabel, VolModel, bubble_classify, cev_region, cev_vol_model,
                      cev_spec, driftless_dichotomy)
from .classify import (Classification, EndpointReport, Verdict, classify_martingale, classify_no_exit,
                       endpoint_report, equivalence_checks)
from .coeffspec import (ConfigSyntaxError, DomainError, ProblemSpec, ValidationError, evaluate,
                        is_b_zero_ae, load_problem, parse_expr, parse_problem, print_problem)
from .mcsim import (EstimateReport, SimConfig, occupation_check, simulate, simulate_EZ,
                    simulate_survival)
from .quad import IntegralVerdict, integrate, probe_tail
from .scale import AnalysisOptions, ScaleBundle, build_scale, feller_limit
from .septime import (ArrangementReport, SdePair, SeparatingSetReport, arrangement_of_exponential,
                      mutual_arrangement, separating_set)
from .tri import Tri

__version__ = "0.1.0"

__all__ = [
    "AnalysisOptions", "ArrangementReport", "AsymptoticForm", "BubbleReport", "Classification",
    "ConfigSyntaxError", "DomainError", "EndpointReport", "EstimateReport", "IntegralVerdict",
    "ProblemSpec", "RegionLabel", "ScaleBundle", "SdePair", "SeparatingSetReport", "SimConfig", "Tri",
    "ValidationError", "Verdict", "VolModel", "arrangement_of_exponential", "cev_vol_model",
    "bubble_classify", "build_scale", "cev_region", "cev_spec", "classify_martingale",
    "classify_no_exit", "decide_convergence", "driftless_dichotomy", "endpoint_report",
    "equivalence_checks", "evaluate", "feller_limit", "integrate", "integrate_tail", "is_b_zero_ae",
    "load_problem", "mutual_arrangement", "occupation_check", "parse_expr", "parse_problem",
    "print_problem", "probe_tail", "separating_set", "simulate", "simulate_EZ", "simulate_survival",
]

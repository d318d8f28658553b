"""Verdict table for dY = |Y|^alpha dt + dW, Z = exp(int Y dW - 1/2 int Y^2 dt).

Usage: python scripts/power_drift_table.py [--numeric]
"""
import argparse
import time

from stricttest.battery import POWER_DRIFT_ALPHAS, power_drift_expected, power_drift_spec
from stricttest.classify import classify_martingale
from stricttest.scale import AnalysisOptions


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--numeric", action="store_true", help="quadrature only, no asymptotic shortcut")
    args = ap.parse_args()
    opts = AnalysisOptions(use_asymptotics=not args.numeric)
    t0 = time.perf_counter()
    print(f"{'alpha':>6}  {'verdict':<30} {'expected':<30} fired")
    for a in POWER_DRIFT_ALPHAS:
        c = classify_martingale(power_drift_spec(a), opts)
        want = power_drift_expected(a)
        mark = "" if c.verdict is want else "  <-- mismatch"
        print(f"{a:6g}  {str(c.verdict):<30} {str(want):<30} {','.join(sorted(c.triggered_conditions))}{mark}")
    print(f"{time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()

"""Region map of the generalised CEV exponential over (alpha, beta) in [-2, 2]^2.

Prints the map as characters (U = UI martingale, M = martingale not UI,
S = strict local martingale, ? = undetermined, lowercase = disagrees with the
closed-form region) and optionally writes the sweep as CSV.
"""
import argparse
import csv
import time

from stricttest.bubbles import cev_region, cev_spec, region_of
from stricttest.classify import Verdict, classify_martingale

CHAR = {Verdict.UI: "U", Verdict.MARTINGALE_NOT_UI: "M", Verdict.STRICT_LOCAL: "S", Verdict.UNKNOWN: "?"}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--step", type=float, default=0.2)
    ap.add_argument("--mu0", type=float, default=1.0)
    ap.add_argument("--sigma0", type=float, default=1.0)
    ap.add_argument("--csv")
    args = ap.parse_args()
    n = int(round(4.0 / args.step))
    grid = [round(-2.0 + args.step * i, 10) for i in range(n + 1)]
    t0 = time.perf_counter()
    rows, bad = [], 0
    for b in reversed(grid):
        line = []
        for a in grid:
            v = classify_martingale(cev_spec(a, b, args.mu0, args.sigma0)).verdict
            ok = region_of(v) is cev_region(a, b)
            bad += not ok
            line.append(CHAR[v] if ok else CHAR[v].lower())
            rows.append((a, b, str(v), str(cev_region(a, b))))
        print(f"beta={b:5.2f} " + "".join(line))
    print(f"{len(rows)} points, {bad} disagreements with the closed-form region, "
          f"{time.perf_counter() - t0:.1f} s")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["alpha", "beta", "verdict", "region"])
            w.writerows(rows)


if __name__ == "__main__":
    main()

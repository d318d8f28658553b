"""Monte-Carlo checks of E Z_T and of the occupation-times identity.

Usage: python scripts/mc_checks.py [--paths N] [--threads K]
"""
import argparse
import time

from stricttest.battery import power_drift_spec
from stricttest.coeffspec import parse_problem
from stricttest.mcsim import BOTH, SimConfig, dual_agreement, occupation_check, simulate, truncation_ladder

LADDERS = ((0.99, 0.999, 0.9999), (0.9, 0.99, 0.999), (0.999, 0.9999, 0.99999))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--step", type=float, default=1e-3)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--seed", type=int, default=SimConfig.seed)
    args = ap.parse_args()
    cfg = SimConfig(step=args.step, paths=args.paths, seed=args.seed, threads=args.threads, estimator=BOTH)

    for alpha in (0.5, 2.0, 4.0):
        t0 = time.perf_counter()
        direct, aux = simulate(power_drift_spec(alpha), cfg)
        print(f"alpha={alpha:g}: direct {direct.estimate:.4f} +/- {direct.se:.4f} "
              f"(z={direct.z_score():+.2f}), survival {aux.estimate:.4f} +/- {aux.se:.4f}, "
              f"agree={dual_agreement(direct, aux)}, absorbed right {direct.absorbed_right}, "
              f"{time.perf_counter() - t0:.1f} s")

    spec = power_drift_spec(2.0)
    for q in LADDERS:
        reps, ok = truncation_ladder(spec, SimConfig(step=args.step, paths=args.paths, seed=args.seed,
                                                     threads=args.threads), q)
        print(f"truncation ladder {q}: " + ", ".join(f"{r.estimate:.4f}" for r in reps) + f"  monotone={ok}")

    bm = parse_problem("interval=(-inf,inf); x0=0; mu=0; sigma=1; b=x")
    meds = []
    for h in (1e-4, 2.5e-5):
        rep = occupation_check(bm, SimConfig(step=h, paths=1000, seed=args.seed, threads=args.threads))
        meds.append(rep.median)
        print(f"occupation h={h:g}: median relative discrepancy {rep.median:.4%} over {rep.used} paths")
    print(f"ratio after quartering h: {meds[1] / meds[0]:.2f}")


if __name__ == "__main__":
    main()

"""Mutual arrangement of reference pairs, and the classify / arrangement bridge
over the regression battery."""
from stricttest.battery import battery
from stricttest.classify import classify_martingale
from stricttest.coeffspec import parse_problem
from stricttest.septime import SdePair, arrangement_of_exponential, mutual_arrangement

PAIRS = {
    "identical OU": "interval=(-inf,inf); x0=0; mu=-x; sigma=1; mutilde=-x; sigmatilde=1",
    "BM vs unit drift": "interval=(-inf,inf); x0=0; mu=0; sigma=1; mutilde=1; sigmatilde=1",
    "BM vs OU": "interval=(-inf,inf); x0=0; mu=0; sigma=1; mutilde=-x; sigmatilde=1",
    "BM vs Bessel(3)": "interval=(0,inf); x0=1; mu=0; sigma=1; mutilde=1/x; sigmatilde=1",
    "sigma 1 vs 2": "interval=(-inf,inf); x0=0; mu=0; sigma=1; mutilde=0; sigmatilde=2",
    "drift spike at 2.5": "interval=(0,inf); x0=1; mu=0; sigma=1; mutilde=abs(x-2.5)^-0.5; sigmatilde=1",
}


def main() -> None:
    for name, text in PAIRS.items():
        a = mutual_arrangement(SdePair.from_spec(parse_problem(text)))
        flags = "  ".join(f"{k}={v}" for k, v in a.flags().items())
        print(f"{name:<20} {a.summary():<14} {flags}")
    print()
    broken = 0
    for e in battery():
        a, c = arrangement_of_exponential(e.spec), classify_martingale(e.spec)
        ok = a.tilde_loc_ac is c.martingale_all_T and a.tilde_ac is c.ui_martingale
        broken += not ok
        print(f"{e.name:<28} {str(c.verdict):<30} loc<<={a.tilde_loc_ac} <<={a.tilde_ac}{'' if ok else '  <-- bridge broken'}")
    print(f"bridge broken on {broken} specs")


if __name__ == "__main__":
    main()

"""Bubble type of dS = mu0 S dt + sigma0 S^alpha dW over an (alpha, mu0) grid,
with the zero-rate dichotomy on x / sigma^2 shown next to the full pipeline."""
from stricttest.bubbles import bubble_classify, cev_vol_model, driftless_dichotomy


def main() -> None:
    print(f"{'alpha':>6} {'mu0':>5}  {'martingale':<10} {'UI':<7} {'bubble':<15} dichotomy")
    for alpha in (0.0, 0.5, 1.0, 1.25, 1.5, 2.0, 3.0):
        for mu0 in (0.0, 0.05):
            m = cev_vol_model(alpha, mu0)
            b = bubble_classify(m)
            quick = driftless_dichotomy(m.sigma, m.x0, m.params).label if mu0 == 0.0 else "-"
            c = b.classification
            print(f"{alpha:6g} {mu0:5g}  {str(c.martingale_all_T):<10} {str(c.ui_martingale):<7} "
                  f"{b.label:<15} {quick}")


if __name__ == "__main__":
    main()

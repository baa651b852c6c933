"""A small version of the CLT experiment, end to end.

Runs the Chernoff constants, turns them into limit constants for the linear
density, simulates the centred and scaled Hellinger statistic on a grid of
sample sizes and writes the records CSV plus its JSON summary to ``--out``.
Normality improves slowly (the rate is n^(1/6)), so expect a KS distance that
falls with n but stays visible at these sizes.

    python demos/06_clt_experiment.py --out /tmp/grenlab-demo
"""

import argparse
from pathlib import Path

from grenlab import ChernoffConfig, estimate_constants
from grenlab.harness import ExperimentConfig, run, write_records


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="grenlab-demo")
    ap.add_argument("--reps", type=int, default=400)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    est = estimate_constants(ChernoffConfig(delta=5e-3, a_step=0.25, replicates=5000, seed=1, batches=50))
    est.save(out / "chernoff.json")
    cfg = ExperimentConfig("density-linear", (250, 1000, 4000), args.reps, seed=2, constants_path=str(out / "chernoff.json"))
    res = run(cfg)
    side = write_records(res, out / "clt.csv")

    print(f"mu^2 = {res.constants['mu_sq']:.4f}, sigma~^2 = {res.constants['sigma_tilde_sq']:.4f}")
    print(f"{'n':>6}{'KS':>8}{'skew':>8}{'mean n^(2/3) 2H^2':>20}")
    for n, row in res.summary.items():
        print(f"{n:>6}{row['ks_standard_normal']:>8.3f}{row['skewness']:>8.3f}{row['mean_scaled_sq']:>20.4f}")
    print(f"\nrecords: {out / 'clt.csv'}\nsummary: {side}")


if __name__ == "__main__":
    main()

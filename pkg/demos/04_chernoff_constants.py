"""Monte Carlo for the two universal constants of the Chernoff process.

X(a) is the location of the maximum of W(u) - (u - a)^2 for a two-sided
Brownian motion W. The demo estimates m2 = E X(0)^2 and
k2 = int_0^A cov(X(0)^2, (X(a) - a)^2) da on a coarse grid so that it runs
in seconds; the command-line tool does the full-size run.

    python demos/04_chernoff_constants.py --reps 5000
"""

import argparse

from grenlab import ChernoffConfig, estimate_constants


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5000)
    ap.add_argument("--delta", type=float, default=5e-3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = ChernoffConfig(delta=args.delta, a_step=0.25, replicates=args.reps, seed=args.seed, batches=50)
    est = estimate_constants(cfg)
    print(f"m2 = {est.m2:.4f} +- {est.m2_se:.4f}")
    print(f"k2 = {est.k2:.4f} +- {est.k2_se:.4f}")
    print(f"boundary-hit fraction {est.boundary_hit_fraction:.1e} (window ok: {est.window_ok})")
    print("\ncovariance curve (decays fast, so A = 8 is ample):")
    for a, c in est.cov_curve[::4]:
        print(f"  a={a:4.1f}  {c:+.5f}  " + "#" * max(0, int(200 * c)))


if __name__ == "__main__":
    main()

"""Limit constants for every built-in model.

Given m2 and k2, the centring constant mu^2 and the variance sigma^2 are
integrals over the truth. For the two density models the variance of the
centred statistic collapses to k2 / (4 m2) whatever the density is; the other
models depend on their time transform.
"""

from grenlab import REGISTRY, get_model, limit_constants

# values from a 10^5-replicate run of the chernoff command
M2, K2 = 0.2641, 0.0350


def main():
    print(f"m2 = {M2}, k2 = {K2}, k2/(4 m2) = {K2 / (4 * M2):.5f}\n")
    print(f"{'model':<20}{'mu^2':>10}{'sigma^2':>10}{'mu~':>10}{'sigma~^2':>11}")
    for model_id in sorted(REGISTRY):
        lc = limit_constants(get_model(model_id), M2, K2)
        print(f"{model_id:<20}{lc.mu_sq:>10.5f}{lc.sigma_sq:>10.5f}{lc.mu_tilde:>10.5f}{lc.sigma_tilde_sq:>11.5f}")


if __name__ == "__main__":
    main()

import numpy as np
import pytest

from grenlab.chernoff import ChernoffConfig, ChernoffEstimates
from grenlab.exceptions import ModelInvalidError
from grenlab.limits import LimitConstants, hellinger_limits, limit_constants, mu_squared, sigma_squared
from grenlab.models import REGISTRY, TruthModel, get_model, linear_density, linear_regression

# int_0^1 (1.5 - t)^(-1/3) dt
LINEAR_CUBE_ROOT = 1.5 * (1.5 ** (2 / 3) - 0.5 ** (2 / 3))


@pytest.mark.parametrize("m2", [0.1, 0.2641, 1.0])
def test_mu_squared_density_linear(m2):
    assert mu_squared(linear_density(), m2) == pytest.approx(m2 * 2 ** (-2 / 3) * LINEAR_CUBE_ROOT, rel=1e-10)


@pytest.mark.parametrize("k2", [0.01, 0.035, 1.0])
def test_sigma_squared_density_linear(k2):
    assert sigma_squared(linear_density(), k2) == pytest.approx(2 ** (1 / 3) * k2 * LINEAR_CUBE_ROOT, rel=1e-10)


def test_regression_unit_noise():
    m = linear_regression(1.0)
    assert mu_squared(m, 0.3) == pytest.approx(0.3 * 2 ** (-2 / 3) * np.log(3.0), rel=1e-10)
    # int_0^1 (1.5 - t)^-2 dt = 1/0.5 - 1/1.5
    assert sigma_squared(m, 0.04) == pytest.approx(2 ** (1 / 3) * 0.04 * (2 - 2 / 3), rel=1e-10)


def test_linearity():
    m = get_model("density-exp")
    assert mu_squared(m, 0.6) == pytest.approx(2 * mu_squared(m, 0.3), rel=1e-15)
    assert sigma_squared(m, 0.6) == pytest.approx(2 * sigma_squared(m, 0.3), rel=1e-15)


@pytest.mark.parametrize("model_id", sorted(REGISTRY))
def test_standardisation_identities_and_positivity(model_id):
    lc = limit_constants(get_model(model_id), 0.2641, 0.035)
    assert min(lc.mu_sq, lc.sigma_sq, lc.mu_tilde, lc.sigma_tilde_sq) > 0
    assert lc.mu_tilde**2 == pytest.approx(lc.mu_sq / 2, rel=1e-12)
    assert lc.sigma_tilde_sq * 8 * lc.mu_sq == pytest.approx(lc.sigma_sq, rel=1e-12)


@pytest.mark.parametrize("model_id", ["density-linear", "density-exp", "poisson-linear"])
def test_variance_free_of_lambda_when_L_is_Lambda(model_id):
    m2, k2 = 0.2641, 0.035
    lc = limit_constants(get_model(model_id), m2, k2)
    assert lc.sigma_tilde_sq == pytest.approx(k2 / (4 * m2), abs=1e-9)


def test_regression_and_hazard_variance_depends_on_model():
    vals = [limit_constants(get_model(k), 0.2641, 0.035).sigma_tilde_sq for k in ("regression-linear", "hazard-linear")]
    assert all(abs(v - 0.035 / (4 * 0.2641)) > 1e-3 for v in vals)


@pytest.mark.parametrize("model_id", sorted(REGISTRY))
def test_panel_refinement(model_id):
    m = get_model(model_id)
    assert mu_squared(m, 1.0, panels=256) == pytest.approx(mu_squared(m, 1.0), rel=1e-10)
    assert sigma_squared(m, 1.0, panels=256) == pytest.approx(sigma_squared(m, 1.0), rel=1e-10)


def test_non_finite_integrand():
    zero_half = TruthModel(
        "zero-on-right-half",
        "density",
        lam=lambda t: np.where(np.asarray(t) > 0.5, 0.0, 1.0),
        dlam=lambda t: -np.ones_like(np.asarray(t, dtype=float)),
        Lam=lambda t: np.asarray(t),
        lam_inv=lambda y: np.asarray(y),
        L=lambda t: np.asarray(t),
        dL=lambda t: np.ones_like(np.asarray(t, dtype=float)),
    )
    with pytest.raises(ModelInvalidError):
        mu_squared(zero_half, 1.0)


def test_hellinger_limits_from_estimates_and_roundtrip(tmp_path):
    est = ChernoffEstimates(0.26, 0.001, 0.035, 0.001, [(0.0, 0.1), (8.0, 0.0)], [0.0, 0.0], 0.0, ChernoffConfig(replicates=100))
    lc = hellinger_limits(linear_density(), est)
    assert lc.provenance["model"] == "density-linear"
    assert lc.provenance["chernoff"]["replicates"] == 100
    lc.save(tmp_path / "l.json")
    import json

    again = LimitConstants.from_dict(json.loads((tmp_path / "l.json").read_text()))
    assert again == lc

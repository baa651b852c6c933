import numpy as np
import pytest
from scipy import stats

from grenlab.chernoff import (
    ChernoffConfig,
    ChernoffEstimates,
    argmax_curve,
    argmax_parabola,
    estimate_constants,
    replicate_rng,
    sample_scaled_argmax,
    scaling_check,
    simulate_path,
    summarize_curves,
)
from grenlab.exceptions import ConfigurationError, InsufficientReplicatesError, InvalidWindowError

SMALL = ChernoffConfig(delta=1e-2, trunc=2.5, a_max=4.0, a_step=0.5, replicates=2000, seed=3, batches=20)


class TestPath:
    def test_anchor(self):
        u, w = simulate_path(1, -1.0, 2.0, 0.01)
        assert w[np.flatnonzero(u == 0)[0]] == 0.0
        assert u[0] == pytest.approx(-1.0) and u[-1] == pytest.approx(2.0)
        assert np.allclose(np.diff(u), 0.01)

    def test_marginal_and_covariance(self):
        draws = np.array([simulate_path(replicate_rng(5, i), -0.5, 1.0, 0.01)[1][[100, 150]] for i in range(10_000)])
        w_half, w_one = draws[:, 0], draws[:, 1]
        se_var = np.sqrt(2 / (draws.shape[0] - 1))
        assert abs(w_one.var(ddof=1) - 1.0) < 3 * se_var
        prod = w_half * w_one
        assert abs(prod.mean() - 0.5) < 3 * prod.std(ddof=1) / np.sqrt(prod.size)

    def test_bad_window(self):
        with pytest.raises(InvalidWindowError):
            simulate_path(0, 0.5, 1.0, 0.01)


class TestArgmax:
    u = np.round(np.arange(-300, 301) * 0.01, 12)

    def test_zero_path(self):
        assert argmax_parabola(self.u, np.zeros_like(self.u), 0.7) == pytest.approx(0.7)

    def test_linear_ramp(self):
        assert argmax_parabola(self.u, self.u.copy(), 0.0) == pytest.approx(0.5)

    def test_ties_go_right(self):
        # flat path, vertex halfway between grid points 0 and 1: exact tie
        u = np.array([-1.0, 0.0, 1.0, 2.0])
        assert argmax_parabola(u, np.zeros(4), 0.5) == 1.0

    def test_window_not_covered(self):
        with pytest.raises(InvalidWindowError):
            argmax_parabola(self.u, np.zeros_like(self.u), 1.0, trunc=2.5)

    def test_hull_curve_matches_grid_search(self):
        a = np.arange(0, 41) * 0.1
        for i in range(20):
            u, w = simulate_path(replicate_rng(9, i), -2.5, 6.5, 1e-3)
            brute = [argmax_parabola(u, w, ai) for ai in a]
            np.testing.assert_array_equal(argmax_curve(u, w, a), brute)


@pytest.fixture(scope="module")
def est():
    return estimate_constants(SMALL, workers=1)


class TestEstimates:
    def test_cov_at_zero_is_variance(self, est):
        x0sq = est.samples[:, 0] ** 2
        assert est.cov_curve[0][1] == pytest.approx(x0sq.var(ddof=1), abs=1e-12)

    def test_symmetry(self, est):
        x0 = est.samples[:, 0]
        assert abs(x0.mean()) <= 3 * x0.std(ddof=1) / np.sqrt(x0.size)
        skew_se = np.sqrt(6 / x0.size)
        assert abs(stats.skew(x0)) <= 3 * skew_se

    def test_fields(self, est):
        assert est.m2 > 0 and est.m2_se > 0 and est.k2_se > 0
        assert len(est.cov_curve) == len(SMALL.a_grid) == len(est.cov_se)
        assert abs(est.cov_curve[-1][1]) <= 3 * est.cov_se[-1]

    def test_json_roundtrip(self, est, tmp_path):
        p = tmp_path / "c.json"
        est.save(p)
        back = ChernoffEstimates.load(p)
        assert back == est
        assert back.samples is None

    def test_worker_independent(self, est):
        again = estimate_constants(SMALL, workers=2)
        np.testing.assert_array_equal(again.samples, est.samples)
        assert again.to_dict() == est.to_dict()

    def test_summarize_too_few(self):
        with pytest.raises(InsufficientReplicatesError):
            summarize_curves(np.zeros((50, 3)), SMALL)


def test_too_few_replicates():
    cfg = ChernoffConfig(replicates=50)
    with pytest.raises(InsufficientReplicatesError):
        estimate_constants(cfg)


@pytest.mark.parametrize(
    "kw", [{"delta": 0}, {"trunc": 1.0}, {"a_max": 3.0}, {"a_step": -0.1}, {"replicates": 0}]
)
def test_config_validation(kw):
    with pytest.raises(ConfigurationError):
        ChernoffConfig(**kw)


def test_missing_constants_file(tmp_path):
    with pytest.raises(ConfigurationError):
        ChernoffEstimates.load(tmp_path / "nope.json")


def test_scaling_same_law_small():
    cfg = ChernoffConfig(delta=1e-2, replicates=5000, seed=4)
    assert scaling_check(1.0, cfg, workers=1) < 1.63 * np.sqrt(2 / 5000)


def test_refinement_stability():
    coarse = sample_scaled_argmax(1.0, ChernoffConfig(delta=2e-3, replicates=20_000, seed=8), stream=0, workers=1)
    fine = sample_scaled_argmax(1.0, ChernoffConfig(delta=1e-3, replicates=20_000, seed=9), stream=0, workers=1)
    se = np.hypot(*(np.std(x**2, ddof=1) / np.sqrt(x.size) for x in (coarse, fine)))
    assert abs(np.mean(coarse**2) - np.mean(fine**2)) < 3 * se

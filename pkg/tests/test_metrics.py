import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grenlab.exceptions import InvalidEstimateError, InvalidParameterError
from grenlab.isotonic import MonotoneStepEstimate
from grenlab.metrics import (
    cubic_l3,
    gap_bound_constant,
    hellinger,
    loss_report,
    lp_distance,
    weighted_l2_sq,
)
from grenlab.models import get_model, linear_density
from oracles import bisection_quad, random_staircase

LINEAR = lambda t: 1.5 - np.asarray(t)
ONE_PIECE = MonotoneStepEstimate([0, 1], [1.0])


def const(b):
    return lambda t: np.full_like(np.asarray(t, dtype=float), b)


def staircase_of(f, pieces):
    b = np.linspace(0, 1, pieces + 1)
    # left-continuous staircase: value at the right end of each piece
    return MonotoneStepEstimate(b, f(b[1:]))


class TestConstants:
    @pytest.mark.parametrize("a, b", [(1.0, 2.0), (0.3, 0.3), (4.0, 0.5)])
    def test_closed_forms(self, a, b):
        est = MonotoneStepEstimate([0, 1], [a])
        assert hellinger(est, const(b)) == pytest.approx(abs(np.sqrt(a) - np.sqrt(b)) / np.sqrt(2), abs=1e-14)
        assert lp_distance(est, const(b), 3) == pytest.approx(abs(a - b), abs=1e-13)
        assert lp_distance(est, const(b), 1.5) == pytest.approx(abs(a - b), abs=1e-13)
        assert weighted_l2_sq(est, const(b)) == pytest.approx((a - b) ** 2 / (4 * b), abs=1e-14)
        assert cubic_l3(est, const(b)) == pytest.approx(abs(a - b) ** 3, abs=1e-14)

    def test_cubic_hand_value(self):
        assert cubic_l3(ONE_PIECE, LINEAR) == pytest.approx(0.03125, abs=1e-10)

    def test_hellinger_one_piece_vs_oracle(self):
        want = np.sqrt(0.5 * bisection_quad(lambda t: (1 - np.sqrt(1.5 - t)) ** 2))
        assert hellinger(ONE_PIECE, LINEAR) == pytest.approx(want, abs=1e-10)


class TestRefinement:
    @pytest.mark.parametrize("metric", [hellinger, weighted_l2_sq, cubic_l3])
    def test_tends_to_zero(self, metric):
        vals = [metric(staircase_of(LINEAR, k), LINEAR) for k in (10, 100, 1000)]
        assert vals[-1] < 1e-3
        assert vals[0] > vals[1] > vals[2]

    def test_identical_staircases(self):
        rng = np.random.default_rng(0)
        s = random_staircase(rng)
        assert hellinger(s, s) == 0.0
        assert lp_distance(s, s, 2) == 0.0
        assert cubic_l3(s, s) == 0.0


class TestAgainstOracle:
    def test_random_cases(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            est = random_staircase(rng, lo=0.1, hi=3.0)
            model = get_model(rng.choice(["density-linear", "density-exp", "poisson-linear"]))
            lam = model.lam
            f = lambda g: bisection_quad(lambda t: g(est(t), lam(t)))
            assert hellinger(est, model) == pytest.approx(np.sqrt(0.5 * f(lambda c, l: (np.sqrt(c) - np.sqrt(l)) ** 2)), abs=1e-10)
            assert weighted_l2_sq(est, model) == pytest.approx(f(lambda c, l: (c - l) ** 2 / (4 * l)), abs=1e-10)
            assert cubic_l3(est, model) == pytest.approx(f(lambda c, l: np.abs(c - l) ** 3), abs=1e-10)
            assert lp_distance(est, model, 1) == pytest.approx(f(lambda c, l: np.abs(c - l)), abs=1e-10)


class TestSymmetry:
    def test_hellinger_symmetric_on_staircases(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            f, g = random_staircase(rng), random_staircase(rng)
            assert hellinger(f, g) == pytest.approx(hellinger(g, f), abs=1e-14)
            assert lp_distance(f, g, 3) == pytest.approx(lp_distance(g, f, 3), abs=1e-13)


class TestPolynomialExactness:
    # truth (1.2 - t)^5 + 0.1 is a degree-5 polynomial; est is a two-piece staircase
    truth = staticmethod(lambda t: (1.2 - np.asarray(t)) ** 5 + 0.1)
    est = MonotoneStepEstimate([0, 0.4, 1], [3.0, 0.05])

    def antiderivative_check(self, p):
        import sympy as sp

        t = sp.symbols("t")
        poly = (sp.Rational(6, 5) - t) ** 5 + sp.Rational(1, 10)
        total = sum(
            sp.integrate(sp.expand((c - poly) ** p), (t, lo, hi))
            for (lo, hi), c in zip([(0, sp.Rational(2, 5)), (sp.Rational(2, 5), 1)], [3, sp.Rational(1, 20)])
        )
        return float(total)

    @pytest.mark.parametrize("p", [2, 4])
    def test_even_powers(self, p):
        assert lp_distance(self.est, self.truth, p) ** p == pytest.approx(self.antiderivative_check(p), rel=1e-12)

    def test_cubic_with_crossing(self):
        from numpy.polynomial import polynomial as P

        # split each piece at the crossing root found by numpy's polynomial solver
        poly = P.polyadd(P.polypow([1.2, -1.0], 5), [0.1])
        total = 0.0
        for (lo, hi), c in zip([(0, 0.4), (0.4, 1.0)], [3.0, 0.05]):
            diff = P.polysub([c], poly)
            roots = [r.real for r in P.polyroots(diff) if abs(r.imag) < 1e-12 and lo < r.real < hi]
            edges = [lo, *sorted(roots), hi]
            anti = P.polyint(P.polypow(diff, 3))
            for a, b in zip(edges[:-1], edges[1:]):
                total += abs(P.polyval(b, anti) - P.polyval(a, anti))
        assert cubic_l3(self.est, self.truth) == pytest.approx(total, rel=1e-12)


class TestErrors:
    def test_negative_level(self):
        est = MonotoneStepEstimate([0, 0.5, 1], [1.0, -0.5])
        for metric in (hellinger, weighted_l2_sq, cubic_l3):
            with pytest.raises(InvalidEstimateError):
                metric(est, LINEAR)

    @pytest.mark.parametrize("p", [0.5, 0, -1])
    def test_bad_p(self, p):
        with pytest.raises(InvalidParameterError):
            lp_distance(ONE_PIECE, LINEAR, p)


def test_loss_report_consistency():
    rng = np.random.default_rng(3)
    est = random_staircase(rng)
    m = linear_density()
    rep = loss_report(est, m)
    assert rep.hellinger == pytest.approx(hellinger(est, m), rel=1e-14)
    assert rep.hellinger_sq_x2 == pytest.approx(2 * rep.hellinger**2, rel=1e-12)
    assert rep.weighted_l2 == pytest.approx(weighted_l2_sq(est, m), rel=1e-14)
    assert rep.gap == pytest.approx(abs(rep.hellinger_sq_x2 - rep.weighted_l2), rel=1e-14)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["density-linear", "density-exp", "poisson-linear", "hazard-linear"]))
def test_gap_bound(seed, model_id):
    m = get_model(model_id)
    est = random_staircase(np.random.default_rng(seed), lo=0.0, hi=4.0)
    rep = loss_report(est, m)
    assert rep.gap <= gap_bound_constant(m.lam_min) * rep.cubic + 1e-15


@pytest.mark.parametrize("p", [1.0, 1.1, 1.5, 2.5, 3.7])
def test_non_integer_power_at_crossing(p):
    # |1 - (1.5 - t)|^p = |t - 0.5|^p, integral 2 * 0.5^(p+1) / (p+1)
    want = (2 * 0.5 ** (p + 1) / (p + 1)) ** (1 / p)
    assert lp_distance(ONE_PIECE, LINEAR, p) == pytest.approx(want, rel=1e-13)

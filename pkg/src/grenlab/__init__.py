"""Grenander-type monotone estimators and Monte Carlo checks of the Hellinger-loss CLT."""

from .chernoff import ChernoffConfig, ChernoffEstimates, estimate_constants, scaling_check
from .isotonic import (
    Knot,
    MonotoneStepEstimate,
    PiecewiseLinear,
    StepFunction,
    evaluate,
    gcm,
    grenander_fit,
    inverse_estimator,
    lcm,
)
from .limits import LimitConstants, hellinger_limits, limit_constants, mu_squared, sigma_squared
from .metrics import LossReport, cubic_l3, hellinger, loss_report, lp_distance, weighted_l2_sq
from .models import REGISTRY, SampleConfig, TruthModel, get_model, sample, truth_selfcheck

__version__ = "0.1.0"

"""Loss functionals between a step estimate and a smooth (or step) truth.

Every integral is taken piece by piece over the constancy intervals of the
estimate with fixed-order Gauss-Legendre. Integrands with a kink where the
estimate crosses the truth (odd absolute powers) are additionally split at
that crossing. A non-integer power is not smooth at the crossing even after
splitting, so the pieces next to a crossing are also cut into geometrically
shrinking intervals.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import InvalidEstimateError, InvalidParameterError
from .isotonic import MonotoneStepEstimate

GL_ORDER = 20
#: Number of halvings used to grade a piece toward a crossing.
GRADE_LEVELS = 40
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


def _lam_of(truth):
    if isinstance(truth, MonotoneStepEstimate) or callable(truth) and not hasattr(truth, "lam"):
        return truth
    return truth.lam


def _pieces(est: MonotoneStepEstimate, truth):
    b = est.breakpoints
    if isinstance(truth, MonotoneStepEstimate):
        b = np.union1d(b, truth.breakpoints)
    lo, hi = b[:-1], b[1:]
    return lo, hi, est(0.5 * (lo + hi))


def _split_at_crossings(lo, hi, c, lam):
    """Split each piece where ``c - lam`` changes sign (bisection, 60 halvings).

    Returns the new pieces and the number of the original pieces that were
    split; the last ``2 * k`` entries of the result are the split halves.
    """
    with np.errstate(invalid="ignore"):
        dlo = c - lam(lo)
        dhi = c - lam(hi)
    cross = np.flatnonzero(dlo * dhi < 0)
    if cross.size == 0:
        return lo, hi, c, 0
    a, b = lo[cross].copy(), hi[cross].copy()
    sa = np.sign(dlo[cross])
    cc = c[cross]
    for _ in range(60):
        m = 0.5 * (a + b)
        same = np.sign(cc - lam(m)) == sa
        a = np.where(same, m, a)
        b = np.where(same, b, m)
    root = 0.5 * (a + b)
    keep = np.ones(lo.size, dtype=bool)
    keep[cross] = False
    return (
        np.concatenate((lo[keep], lo[cross], root)),
        np.concatenate((hi[keep], root, hi[cross])),
        np.concatenate((c[keep], cc, cc)),
        cross.size,
    )


def _grade(lo, hi, c, k):
    """Cut the ``2k`` split halves at the end into intervals shrinking toward the crossing."""
    if k == 0:
        return lo, hi, c
    left = slice(lo.size - 2 * k, lo.size - k)  # crossing at hi
    right = slice(lo.size - k, lo.size)  # crossing at lo
    frac = np.concatenate(([0.0], 0.5 ** np.arange(GRADE_LEVELS, -1, -1)))
    a_r, b_r = lo[right], hi[right]
    # right halves: lo + (hi - lo) * frac, fine near lo
    pts_r = a_r[:, None] + (b_r - a_r)[:, None] * frac
    a_l, b_l = lo[left], hi[left]
    # left halves: hi - (hi - lo) * frac, fine near hi
    pts_l = (b_l[:, None] - (b_l - a_l)[:, None] * frac)[:, ::-1]
    pts = np.concatenate((pts_l, pts_r))
    cc = np.repeat(np.concatenate((c[left], c[right])), frac.size - 1)
    keep = slice(0, lo.size - 2 * k)
    return (
        np.concatenate((lo[keep], pts[:, :-1].ravel())),
        np.concatenate((hi[keep], pts[:, 1:].ravel())),
        np.concatenate((c[keep], cc)),
    )


def piecewise_integral(
    est: MonotoneStepEstimate, truth, integrand, split: bool = False, grade: bool = False
) -> float:
    """``int_0^1 integrand(est(t), lam(t)) dt``, Gauss-Legendre per constancy piece.

    ``truth`` may be a :class:`~grenlab.models.TruthModel`, a plain callable, or
    another :class:`MonotoneStepEstimate` (integrated on the common refinement).
    ``grade`` (which implies ``split``) refines geometrically toward each crossing.
    """
    lam = _lam_of(truth)
    lo, hi, c = _pieces(est, truth)
    if split or grade:
        lo, hi, c, k = _split_at_crossings(lo, hi, c, lam)
        if grade:
            lo, hi, c = _grade(lo, hi, c, k)
    # roots can coincide with an endpoint to within rounding
    nonempty = hi > lo
    lo, hi, c = lo[nonempty], hi[nonempty], c[nonempty]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * _NODES
    vals = integrand(c[:, None], lam(x))
    return float(np.sum(half * (vals @ _WEIGHTS)))


def _check_levels(est, truth=None):
    if np.any(est.levels < 0):
        raise InvalidEstimateError("estimate has negative levels")
    if isinstance(truth, MonotoneStepEstimate) and np.any(truth.levels < 0):
        raise InvalidEstimateError("estimate has negative levels")


def _hellinger_integrand(c, lam):
    return (np.sqrt(c) - np.sqrt(lam)) ** 2


def _weighted_integrand(c, lam):
    return (c - lam) ** 2 / (4.0 * lam)


def _cubic_integrand(c, lam):
    return np.abs(c - lam) ** 3


def hellinger(est: MonotoneStepEstimate, truth) -> float:
    """``sqrt(0.5 * int (sqrt(est) - sqrt(lam))^2)``."""
    _check_levels(est, truth)
    return float(np.sqrt(0.5 * piecewise_integral(est, truth, _hellinger_integrand)))


def lp_distance(est: MonotoneStepEstimate, truth, p: float) -> float:
    """``(int |est - lam|^p)^(1/p)`` for ``p >= 1``.

    Parameters
    ----------
    est : MonotoneStepEstimate
    truth : TruthModel, callable or MonotoneStepEstimate
    p : float
        Even integers need no splitting; other powers are split at crossings,
        and non-integer powers are also graded toward them.
    """
    if not p >= 1:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    integer = float(p).is_integer()
    split = not (integer and int(p) % 2 == 0)
    val = piecewise_integral(est, truth, lambda c, lam: np.abs(c - lam) ** p, split=split, grade=not integer)
    return float(val ** (1.0 / p))


def weighted_l2_sq(est: MonotoneStepEstimate, truth) -> float:
    """``int (est - lam)^2 / (4 lam)``."""
    _check_levels(est, truth)
    return piecewise_integral(est, truth, _weighted_integrand)


def cubic_l3(est: MonotoneStepEstimate, truth) -> float:
    """``int |est - lam|^3``, split at crossings of the truth."""
    _check_levels(est, truth)
    return piecewise_integral(est, truth, _cubic_integrand, split=True)


def gap_bound_constant(lam_min: float) -> float:
    """Constant ``C`` in ``|2H^2 - weighted_l2| <= C * cubic``.

    Uses ``(sqrt(est) + sqrt(lam))^2 >= lam >= lam_min`` and
    ``1 + 2 sqrt(lam) / (sqrt(est) + sqrt(lam)) <= 3``.
    """
    return 3.0 / (4.0 * lam_min**2)


@dataclass(frozen=True)
class LossReport:
    hellinger: float
    hellinger_sq_x2: float
    weighted_l2: float
    cubic: float
    gap: float

    def as_dict(self) -> dict:
        return asdict(self)


def loss_report(est: MonotoneStepEstimate, truth) -> LossReport:
    _check_levels(est, truth)
    h2x2 = piecewise_integral(est, truth, _hellinger_integrand)
    wl2 = piecewise_integral(est, truth, _weighted_integrand)
    cub = piecewise_integral(est, truth, _cubic_integrand, split=True)
    return LossReport(float(np.sqrt(0.5 * h2x2)), h2x2, wl2, cub, abs(h2x2 - wl2))

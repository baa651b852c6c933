"""Least concave majorants, Grenander-type slope estimators and the inverse process.

All objects live on the unit interval. A cadlag step estimate of a primitive is a
:class:`StepFunction`; its least concave majorant (or greatest convex minorant)
is a :class:`PiecewiseLinear`; the left-hand slopes of that envelope form a
:class:`MonotoneStepEstimate`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
from numba import njit

from .exceptions import InvalidInputError, RangeError

Direction = Literal["non-increasing", "non-decreasing"]
DIRECTIONS = ("non-increasing", "non-decreasing")

#: Points within this relative distance of a chord are dropped from a hull.
COLLINEAR_RTOL = 1e-12


class Knot(NamedTuple):
    t: float
    y: float


@njit(cache=True, nogil=True)
def upper_hull(t, y, rtol):
    """Indices of the vertices of the upper convex hull of ``(t, y)``.

    ``t`` must be strictly increasing. Single pass monotone chain; a middle
    point is kept only if it lies strictly above the chord of its neighbours
    (beyond ``rtol`` relative to the cross-product terms).
    """
    n = t.shape[0]
    idx = np.empty(n, dtype=np.int64)
    m = 0
    for k in range(n):
        while m >= 2:
            i = idx[m - 2]
            j = idx[m - 1]
            lhs = (t[j] - t[i]) * (y[k] - y[i])
            rhs = (y[j] - y[i]) * (t[k] - t[i])
            if rhs - lhs > rtol * (abs(lhs) + abs(rhs)):
                break
            m -= 1
        idx[m] = k
        m += 1
    return idx[:m]


@njit(cache=True, nogil=True)
def hull_greatest_argmax(t, y, hull, slopes):
    """Greatest maximiser of ``y - s*t`` over the hull vertices, for each ``s``.

    Edge slopes along an upper hull decrease, so the objective rises along
    every edge steeper than ``s`` and the greatest maximiser is the vertex that
    closes the last edge with slope ``>= s``. Returns indices into ``t``.
    """
    m = hull.shape[0]
    edge = np.empty(m - 1)
    for e in range(m - 1):
        i = hull[e]
        j = hull[e + 1]
        edge[e] = (y[j] - y[i]) / (t[j] - t[i])
    out = np.empty(slopes.shape[0], dtype=np.int64)
    for q in range(slopes.shape[0]):
        s = slopes[q]
        lo = 0
        hi = m - 1
        # count edges with slope >= s (edge is decreasing)
        while lo < hi:
            mid = (lo + hi) // 2
            if edge[mid] >= s:
                lo = mid + 1
            else:
                hi = mid
        out[q] = hull[lo]
    return out


def _as_points(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError("points must be a sequence of (t, y) pairs")
    if arr.shape[0] < 2:
        raise InvalidInputError("at least two points are required")
    t, y = arr[:, 0].copy(), arr[:, 1].copy()
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise InvalidInputError("points must be finite")
    if np.any(np.diff(t) <= 0):
        raise InvalidInputError("abscissae must be strictly increasing")
    if t[0] < 0 or t[-1] > 1:
        raise InvalidInputError("abscissae must lie in [0, 1]")
    return t, y


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise linear function through ``vertices``.

    ``shape`` is ``"concave"`` for a majorant and ``"convex"`` for a minorant.
    """

    t: np.ndarray
    y: np.ndarray
    shape: Literal["concave", "convex"] = "concave"

    @property
    def vertices(self) -> list[Knot]:
        return [Knot(float(a), float(b)) for a, b in zip(self.t, self.y)]

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.y) / np.diff(self.t)

    def __call__(self, t):
        return np.interp(t, self.t, self.y)


def lcm(points) -> PiecewiseLinear:
    """Least concave majorant of a finite point set.

    Parameters
    ----------
    points : array-like of shape (n, 2)
        ``(t, y)`` pairs with strictly increasing ``t`` in [0, 1], ``n >= 2``.

    Returns
    -------
    PiecewiseLinear
        Vertices are a subset of the input points and include the first and
        last one. Slopes strictly decrease; near-collinear points are dropped.
    """
    t, y = _as_points(points)
    h = upper_hull(t, y, COLLINEAR_RTOL)
    return PiecewiseLinear(t[h], y[h], "concave")


def gcm(points) -> PiecewiseLinear:
    """Greatest convex minorant, computed as ``-lcm(-y)``."""
    t, y = _as_points(points)
    h = upper_hull(t, -y, COLLINEAR_RTOL)
    return PiecewiseLinear(t[h], y[h], "convex")


@dataclass(frozen=True)
class StepFunction:
    """Cadlag step function on [0, 1].

    Takes the value ``initial`` on ``[0, knots[0])`` and ``values[i]`` on
    ``[knots[i], knots[i+1])``. Monotonicity is not enforced here, since
    regression primitives may decrease locally.
    """

    knots: np.ndarray
    values: np.ndarray
    initial: float = 0.0

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.ndim != 1 or knots.shape != values.shape:
            raise InvalidInputError("knots and values must be 1-d arrays of equal length")
        if knots.size and (knots[0] < 0 or knots[-1] > 1):
            raise InvalidInputError("knots must lie in [0, 1]")
        if np.any(np.diff(knots) <= 0):
            raise InvalidInputError("knots must be strictly increasing")
        if not (np.all(np.isfinite(values)) and np.isfinite(self.initial)):
            raise InvalidInputError("step values must be finite")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "initial", float(self.initial))

    @classmethod
    def from_jumps(cls, times, jumps, initial=0.0) -> StepFunction:
        """Build from (possibly repeated, unsorted) jump locations and sizes.

        Repeated locations are merged into a single knot carrying the summed jump.
        """
        times = np.asarray(times, dtype=float)
        jumps = np.broadcast_to(np.asarray(jumps, dtype=float), times.shape)
        knots, inv = np.unique(times, return_inverse=True)
        merged = np.zeros(knots.size)
        np.add.at(merged, inv, jumps)
        return cls(knots, initial + np.cumsum(merged), initial)

    def _at(self, t, side):
        t = np.asarray(t, dtype=float)
        padded = np.concatenate(([self.initial], self.values))
        return padded[np.searchsorted(self.knots, t, side=side)]

    def __call__(self, t):
        return self._at(t, "right")

    def left_limit(self, t):
        return self._at(t, "left")

    def upper(self, t):
        """``max(value, left limit)`` at ``t``."""
        return np.maximum(self(t), self.left_limit(t))

    def lower(self, t):
        return np.minimum(self(t), self.left_limit(t))

    def point_set(self, upper: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Abscissae ``{0} U knots U {1}`` with envelope values.

        The envelope of a step function equals the envelope of these points:
        the upper (lower) value at each knot for a majorant (minorant), and
        the plain value at 0.
        """
        t = np.unique(np.concatenate(([0.0], self.knots, [1.0])))
        y = self.upper(t) if upper else self.lower(t)
        y[0] = self(0.0)
        return t, y


@dataclass(frozen=True)
class MonotoneStepEstimate:
    """Left-continuous piecewise constant function on [0, 1].

    ``levels[j]`` applies on ``(breakpoints[j], breakpoints[j+1]]``; the value
    at 0 is ``levels[0]``.
    """

    breakpoints: np.ndarray
    levels: np.ndarray
    direction: Direction = "non-increasing"

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        lv = np.asarray(self.levels, dtype=float)
        if b.ndim != 1 or lv.ndim != 1 or b.size != lv.size + 1 or lv.size == 0:
            raise InvalidInputError("need len(breakpoints) == len(levels) + 1 >= 2")
        if np.any(np.diff(b) <= 0):
            raise InvalidInputError("breakpoints must be strictly increasing")
        if self.direction not in DIRECTIONS:
            raise InvalidInputError(f"unknown direction {self.direction!r}")
        d = np.diff(lv)
        if (self.direction == "non-increasing" and np.any(d > 0)) or (
            self.direction == "non-decreasing" and np.any(d < 0)
        ):
            raise InvalidInputError(f"levels are not {self.direction}")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "levels", lv)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        j = np.searchsorted(self.breakpoints, t, side="left") - 1
        return self.levels[np.clip(j, 0, self.levels.size - 1)]

    def primitive(self) -> StepFunction:
        """Integral of the estimate sampled at its breakpoints, as step data."""
        cum = np.concatenate(([0.0], np.cumsum(self.levels * np.diff(self.breakpoints))))
        return StepFunction(self.breakpoints[1:], cum[1:], cum[0])


def evaluate(est: MonotoneStepEstimate, t):
    """Left-continuous evaluation; raises :class:`RangeError` outside [0, 1]."""
    arr = np.asarray(t, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise RangeError("evaluation point outside [0, 1]")
    out = est(arr)
    return float(out) if out.ndim == 0 else out


def grenander_fit(step: StepFunction, direction: Direction = "non-increasing") -> MonotoneStepEstimate:
    """Left-hand slopes of the LCM (non-increasing) or GCM (non-decreasing) of ``step``."""
    if direction not in DIRECTIONS:
        raise InvalidInputError(f"unknown direction {direction!r}")
    if direction == "non-increasing":
        env = lcm(np.column_stack(step.point_set(upper=True)))
    else:
        env = gcm(np.column_stack(step.point_set(upper=False)))
    slopes = env.slopes
    # the hull drops near-collinear points, but rounding can still leave
    # adjacent slopes out of order by a few ulps
    slopes = np.minimum.accumulate(slopes) if direction == "non-increasing" else np.maximum.accumulate(slopes)
    return MonotoneStepEstimate(env.t, slopes, direction)


def inverse_estimator(step: StepFunction, a: float) -> float:
    """Greatest maximiser over [0, 1] of ``Lambda_n^+(u) - a*u``.

    The objective is linear between knots, so only ``{0} U knots U {1}`` are
    scanned. Values within a relative 1e-12 of the maximum count as ties and
    the largest abscissa wins.
    """
    t, y = step.point_set(upper=True)
    v = y - a * t
    vmax = v.max()
    tol = COLLINEAR_RTOL * max(1.0, np.abs(y).max() + abs(a))
    return float(t[np.flatnonzero(v >= vmax - tol)[-1]])

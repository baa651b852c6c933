"""Monte Carlo for the argmax process of two-sided Brownian motion minus a parabola.

``X(a) = argmax_u {W(u) - (u - a)^2}``. Expanding the square,
``X(a) = argmax_u {f(u) + 2 a u}`` with ``f(u) = W(u) - u^2``, so on a grid the
whole curve ``a -> X(a)`` is read off the upper convex hull of ``f``: ``X(a)``
is the hull vertex where the edge slopes drop below ``-2a``. One hull per
simulated path yields every ``X(a)`` on the ``a``-grid under the joint law
needed for the covariance constant ``k2``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .exceptions import ConfigurationError, InsufficientReplicatesError, InvalidWindowError
from .isotonic import COLLINEAR_RTOL, hull_greatest_argmax, upper_hull
from .parallel import blocks, run_blocks

SCHEMA = "grenlab-v1"


@dataclass(frozen=True)
class ChernoffConfig:
    """Discretisation and sample-size settings.

    ``delta`` grid step, ``trunc`` half width of the argmax window around
    ``a``, ``a_max``/``a_step`` the grid for the covariance integral.
    """

    delta: float = 1e-3
    trunc: float = 2.5
    a_max: float = 8.0
    a_step: float = 0.1
    replicates: int = 100_000
    seed: int = 0
    batches: int = 100

    def __post_init__(self):
        problems = []
        if not self.delta > 0:
            problems.append("delta must be positive")
        if not self.trunc >= 2:
            problems.append("trunc must be >= 2")
        if not self.a_max >= 4:
            problems.append("a_max must be >= 4")
        if not self.a_step > 0:
            problems.append("a_step must be positive")
        if not self.replicates >= 1:
            problems.append("replicates must be >= 1")
        if problems:
            raise ConfigurationError("; ".join(problems))

    @property
    def a_grid(self) -> np.ndarray:
        m = int(round(self.a_max / self.a_step))
        return np.round(np.arange(m + 1) * self.a_step, 12)


def replicate_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for replicate ``index`` of ``stream``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


def simulate_path(seed, lo: float, hi: float, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Two-sided Brownian motion on the grid ``k * delta`` covering ``[lo, hi]``.

    ``seed`` may be an int or a Generator. Forward and backward halves are
    independent cumulative sums of N(0, delta) increments anchored at W(0) = 0.
    """
    if not lo < 0 < hi:
        raise InvalidWindowError("need lo < 0 < hi")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    k_lo = int(round(-lo / delta))
    k_hi = int(round(hi / delta))
    sd = np.sqrt(delta)
    fwd = np.cumsum(rng.standard_normal(k_hi)) * sd
    bwd = np.cumsum(rng.standard_normal(k_lo)) * sd
    w = np.concatenate((bwd[::-1], [0.0], fwd))
    u = np.arange(-k_lo, k_hi + 1) * delta
    return u, w


def argmax_parabola(u: np.ndarray, w: np.ndarray, a: float, c: float = 1.0, trunc: float | None = None) -> float:
    """Grid argmax of ``w(u) - c (u - a)^2``; ties go to the largest ``u``.

    With ``trunc`` the search is limited to ``[a - trunc, a + trunc]``, which
    the path must cover.
    """
    if trunc is not None:
        eps = 1e-9 * max(1.0, abs(a) + trunc)
        if u[0] > a - trunc + eps or u[-1] < a + trunc - eps:
            raise InvalidWindowError(f"path [{u[0]}, {u[-1]}] does not cover [{a - trunc}, {a + trunc}]")
        keep = (u >= a - trunc - eps) & (u <= a + trunc + eps)
        u, w = u[keep], w[keep]
    obj = w - c * (u - a) ** 2
    return float(u[obj.size - 1 - np.argmax(obj[::-1])])


def argmax_curve(u: np.ndarray, w: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``X(a)`` for every ``a`` at once, via the upper hull of ``w - u^2``."""
    f = w - u**2
    hull = upper_hull(u, f, COLLINEAR_RTOL)
    return u[hull_greatest_argmax(u, f, hull, -2.0 * np.asarray(a, dtype=float))]


def _argmax_block(args) -> np.ndarray:
    cfg, start, stop = args
    a = cfg.a_grid
    out = np.empty((stop - start, a.size))
    for r in range(start, stop):
        u, w = simulate_path(replicate_rng(cfg.seed, r), -cfg.trunc, cfg.a_max + cfg.trunc, cfg.delta)
        out[r - start] = argmax_curve(u, w, a)
    return out


def simulate_argmax_curves(cfg: ChernoffConfig, workers: int | None = None) -> np.ndarray:
    """Array of shape ``(replicates, len(a_grid))`` with ``X(a)`` per replicate.

    Replicate ``r`` always uses the stream derived from ``(seed, r)``, so the
    result does not depend on ``workers``.
    """
    tasks = [(cfg, s, e) for s, e in blocks(cfg.replicates, 1000)]
    return np.concatenate(run_blocks(_argmax_block, tasks, workers))


@dataclass
class ChernoffEstimates:
    m2: float
    m2_se: float
    k2: float
    k2_se: float
    cov_curve: list[tuple[float, float]]
    cov_se: list[float]
    boundary_hit_fraction: float
    config: ChernoffConfig
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def window_ok(self) -> bool:
        return self.boundary_hit_fraction <= 1e-4

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "m2": self.m2,
            "m2_se": self.m2_se,
            "k2": self.k2,
            "k2_se": self.k2_se,
            "cov_curve": [[float(a), float(c)] for a, c in self.cov_curve],
            "cov_se": [float(s) for s in self.cov_se],
            "boundary_hit_fraction": self.boundary_hit_fraction,
            "window_ok": self.window_ok,
            "config": asdict(self.config),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ChernoffEstimates:
        try:
            return cls(
                m2=float(d["m2"]),
                m2_se=float(d["m2_se"]),
                k2=float(d["k2"]),
                k2_se=float(d["k2_se"]),
                cov_curve=[(float(a), float(c)) for a, c in d["cov_curve"]],
                cov_se=[float(s) for s in d.get("cov_se", [])],
                boundary_hit_fraction=float(d.get("boundary_hit_fraction", 0.0)),
                config=ChernoffConfig(**d["config"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed constants document: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> ChernoffEstimates:
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except OSError as exc:
            raise ConfigurationError(f"cannot read constants file {path}: {exc}") from exc


def _cov_curve(x0sq: np.ndarray, shifted_sq: np.ndarray) -> np.ndarray:
    d0 = x0sq - x0sq.mean()
    d = shifted_sq - shifted_sq.mean(axis=0)
    return (d0 @ d) / (x0sq.size - 1)


def summarize_curves(curves: np.ndarray, cfg: ChernoffConfig) -> ChernoffEstimates:
    """Moments, covariance curve, ``k2`` and batch standard errors from ``X(a)`` samples."""
    r = curves.shape[0]
    if r < 100:
        raise InsufficientReplicatesError(f"need at least 100 replicates for standard errors, got {r}")
    a = cfg.a_grid
    shifted_sq = (curves - a) ** 2
    x0sq = shifted_sq[:, 0]
    cov = _cov_curve(x0sq, shifted_sq)

    batches = np.array_split(np.arange(r), min(cfg.batches, r))
    bm2, bk2, bcov_end = [], [], []
    for idx in batches:
        c = _cov_curve(x0sq[idx], shifted_sq[idx])
        bm2.append(x0sq[idx].mean())
        bk2.append(np.trapezoid(c, a))
        bcov_end.append(c)
    nb = len(batches)
    bcov = np.array(bcov_end)
    half = cfg.trunc - cfg.delta
    hits = (np.abs(curves - a) >= half).mean(axis=0)
    return ChernoffEstimates(
        m2=float(x0sq.mean()),
        m2_se=float(np.std(bm2, ddof=1) / np.sqrt(nb)),
        k2=float(np.trapezoid(cov, a)),
        k2_se=float(np.std(bk2, ddof=1) / np.sqrt(nb)),
        cov_curve=[(float(ai), float(ci)) for ai, ci in zip(a, cov)],
        cov_se=[float(s) for s in np.std(bcov, axis=0, ddof=1) / np.sqrt(nb)],
        boundary_hit_fraction=float(hits.max()),
        config=cfg,
        samples=curves,
    )


def estimate_constants(cfg: ChernoffConfig, workers: int | None = None) -> ChernoffEstimates:
    """Estimate ``E|X(0)|^2`` and ``k2 = int_0^A cov(|X(0)|^2, |X(a) - a|^2) da``."""
    if cfg.replicates < 100:
        raise InsufficientReplicatesError(f"need at least 100 replicates for standard errors, got {cfg.replicates}")
    return summarize_curves(simulate_argmax_curves(cfg, workers), cfg)


def _scaled_block(args) -> np.ndarray:
    c, half, delta, seed, stream, start, stop = args
    out = np.empty(stop - start)
    for r in range(start, stop):
        u, w = simulate_path(replicate_rng(seed, r, stream), -half, half, delta)
        obj = w - c * u**2
        out[r - start] = u[obj.size - 1 - np.argmax(obj[::-1])]
    return out


def sample_scaled_argmax(c: float, cfg: ChernoffConfig, stream: int, workers: int | None = None) -> np.ndarray:
    """Draws of ``c^(2/3) argmax_u {W(u) - c u^2}``.

    The window is widened to ``trunc * c^(-2/3)`` so that it matches ``trunc``
    after rescaling.
    """
    if not c > 0:
        raise ConfigurationError("curvature c must be positive")
    half = cfg.trunc * c ** (-2.0 / 3.0)
    tasks = [(c, half, cfg.delta, cfg.seed, stream, s, e) for s, e in blocks(cfg.replicates, 1000)]
    return np.concatenate(run_blocks(_scaled_block, tasks, workers)) * c ** (2.0 / 3.0)


def ks_two_sample(x: np.ndarray, y: np.ndarray) -> float:
    return float(stats.ks_2samp(x, y).statistic)


def scaling_check(c: float, cfg: ChernoffConfig, reference: np.ndarray | None = None, workers: int | None = None) -> float:
    """KS distance between ``c^(2/3) argmax{W(u) - c u^2}`` and ``X(0)``.

    ``reference`` defaults to a fresh ``X(0)`` sample drawn from a stream
    disjoint from the scaled one.
    """
    if reference is None:
        reference = sample_scaled_argmax(1.0, cfg, stream=1, workers=workers)
    return ks_two_sample(sample_scaled_argmax(c, cfg, stream=2, workers=workers), reference)

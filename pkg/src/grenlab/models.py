"""Truth models and data generators for the four monotone-estimation settings.

Each :class:`TruthModel` bundles a strictly decreasing, strictly positive
function ``lam`` on [0, 1] with its derivative, primitive, inverse and the
time transform ``L`` that governs the Brownian approximation of
``Lambda_n - Lambda``. Samplers turn a :class:`SampleConfig` into the step
estimate ``Lambda_n`` of the primitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .exceptions import ConfigurationError, ModelInvalidError, ModelMisconfigurationError
from .isotonic import StepFunction

Kind = Literal["density", "poisson", "regression", "hazard"]
Func = Callable[[np.ndarray], np.ndarray]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)


def integrate_from_zero(f: Func, t) -> np.ndarray:
    """``int_0^t f`` by 40-point Gauss-Legendre, vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    half = t[..., None] / 2.0
    u = half * (_GL_NODES + 1.0)
    return np.sum(_GL_WEIGHTS * f(u), axis=-1) * half[..., 0]


def bisect_increasing(f: Func, target, lo: float, hi: float, tol: float = 1e-12) -> np.ndarray:
    """Vectorised bisection for ``f(x) = target`` with ``f`` increasing on ``[lo, hi]``."""
    target = np.asarray(target, dtype=float)
    a = np.full(target.shape, lo)
    b = np.full(target.shape, hi)
    n_iter = int(np.ceil(np.log2((hi - lo) / tol))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        below = f(mid) < target
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class TruthModel:
    """Analytic description of one monotone estimation problem.

    ``lam_inv`` is the inverse of ``lam`` on ``[lam(1), lam(0)]``; ``holder_s``
    is a Hoelder exponent for ``dlam``. ``noise_sd`` is used by regression
    models, ``failure_cdf`` / ``censor_cdf`` by hazard models.
    """

    name: str
    kind: Kind
    lam: Func
    dlam: Func
    Lam: Func
    lam_inv: Func
    L: Func
    dL: Func
    holder_s: float = 1.0
    noise_sd: float | None = None
    failure_cdf: Func | None = None
    censor_cdf: Func | None = None
    censor_sampler: Callable[[np.random.Generator, int], np.ndarray] | None = field(default=None, repr=False)

    @property
    def lam_min(self) -> float:
        return float(self.lam(np.array(1.0)))

    @property
    def lam_max(self) -> float:
        return float(self.lam(np.array(0.0)))


@dataclass(frozen=True)
class SampleConfig:
    model: TruthModel
    n: int
    seed: int | np.random.SeedSequence = 0

    def __post_init__(self):
        if int(self.n) < 1:
            raise ConfigurationError("sample size n must be >= 1")


# ---------------------------------------------------------------------------
# built-in truths


def linear_density() -> TruthModel:
    return TruthModel(
        name="density-linear",
        kind="density",
        lam=lambda t: 1.5 - np.asarray(t),
        dlam=lambda t: -np.ones_like(np.asarray(t, dtype=float)),
        Lam=lambda t: 1.5 * np.asarray(t) - 0.5 * np.asarray(t) ** 2,
        lam_inv=lambda y: 1.5 - np.asarray(y),
        L=lambda t: 1.5 * np.asarray(t) - 0.5 * np.asarray(t) ** 2,
        dL=lambda t: 1.5 - np.asarray(t),
    )


def exponential_density() -> TruthModel:
    c = 1.0 - np.exp(-1.0)
    return TruthModel(
        name="density-exp",
        kind="density",
        lam=lambda t: np.exp(-np.asarray(t)) / c,
        dlam=lambda t: -np.exp(-np.asarray(t)) / c,
        Lam=lambda t: -np.expm1(-np.asarray(t)) / c,
        lam_inv=lambda y: -np.log(np.asarray(y) * c),
        L=lambda t: -np.expm1(-np.asarray(t)) / c,
        dL=lambda t: np.exp(-np.asarray(t)) / c,
    )


def linear_poisson() -> TruthModel:
    return TruthModel(
        name="poisson-linear",
        kind="poisson",
        lam=lambda t: 2.0 - np.asarray(t),
        dlam=lambda t: -np.ones_like(np.asarray(t, dtype=float)),
        Lam=lambda t: 2.0 * np.asarray(t) - 0.5 * np.asarray(t) ** 2,
        lam_inv=lambda y: 2.0 - np.asarray(y),
        L=lambda t: 2.0 * np.asarray(t) - 0.5 * np.asarray(t) ** 2,
        dL=lambda t: 2.0 - np.asarray(t),
    )


def linear_regression(noise_sd: float = 1.0) -> TruthModel:
    var = noise_sd**2
    return TruthModel(
        name="regression-linear",
        kind="regression",
        lam=lambda t: 1.5 - np.asarray(t),
        dlam=lambda t: -np.ones_like(np.asarray(t, dtype=float)),
        Lam=lambda t: 1.5 * np.asarray(t) - 0.5 * np.asarray(t) ** 2,
        lam_inv=lambda y: 1.5 - np.asarray(y),
        L=lambda t: var * np.asarray(t, dtype=float),
        dL=lambda t: np.full_like(np.asarray(t, dtype=float), var),
        noise_sd=noise_sd,
    )


def linear_hazard() -> TruthModel:
    """Failure rate ``1.5 - t`` with uniform(0, 2) censoring.

    Beyond t = 1 the hazard is frozen at 0.5; only whether a failure time
    exceeds 1 matters for the estimator restricted to [0, 1].
    """

    def lam(t):
        return 1.5 - np.asarray(t)

    def Lam(t):
        t = np.asarray(t, dtype=float)
        tc = np.minimum(t, 1.0)
        return 1.5 * tc - 0.5 * tc**2 + 0.5 * np.maximum(t - 1.0, 0.0)

    def F(t):
        return -np.expm1(-Lam(t))

    def G(t):
        return np.clip(np.asarray(t, dtype=float) / 2.0, 0.0, 1.0)

    def dL(t):
        return lam(t) / ((1.0 - F(t)) * (1.0 - G(t)))

    return TruthModel(
        name="hazard-linear",
        kind="hazard",
        lam=lam,
        dlam=lambda t: -np.ones_like(np.asarray(t, dtype=float)),
        Lam=Lam,
        lam_inv=lambda y: 1.5 - np.asarray(y),
        L=lambda t: integrate_from_zero(dL, t),
        dL=dL,
        failure_cdf=F,
        censor_cdf=G,
        censor_sampler=lambda rng, n: rng.uniform(0.0, 2.0, n),
    )


REGISTRY: dict[str, Callable[[], TruthModel]] = {
    "density-linear": linear_density,
    "density-exp": exponential_density,
    "poisson-linear": linear_poisson,
    "regression-linear": lambda: linear_regression(0.1),
    "hazard-linear": linear_hazard,
}


def get_model(model_id: str) -> TruthModel:
    try:
        return REGISTRY[model_id]()
    except KeyError:
        raise ConfigurationError(
            f"unknown model {model_id!r}; choose from {', '.join(sorted(REGISTRY))}"
        ) from None


# ---------------------------------------------------------------------------
# samplers


def _rng(cfg: SampleConfig) -> np.random.Generator:
    return np.random.default_rng(cfg.seed)


def _counting_step(times, n: int) -> StepFunction:
    # cumulative integer counts divided once, so that Lambda_n(1) == 1 exactly for n points
    knots, counts = np.unique(times, return_counts=True)
    return StepFunction(knots, np.cumsum(counts) / n, 0.0)


def sample_density(cfg: SampleConfig, uniforms=None) -> StepFunction:
    """Empirical distribution function of ``n`` draws from the density ``lam``.

    Draws are obtained by inverting ``Lam`` with bisection. ``uniforms`` replaces
    the random uniforms (used to pin down test cases).
    """
    model = cfg.model
    if abs(float(model.Lam(np.array(1.0))) - 1.0) > 1e-9:
        raise ModelMisconfigurationError(f"{model.name}: Lam(1) must equal 1 for a density")
    u = _rng(cfg).uniform(size=cfg.n) if uniforms is None else np.asarray(uniforms, dtype=float)
    x = bisect_increasing(model.Lam, u, 0.0, 1.0)
    return _counting_step(x, u.size)


def sample_poisson(cfg: SampleConfig) -> StepFunction:
    """Average of ``n`` i.i.d. Poisson processes with mean function ``Lam``, on [0, 1].

    The superposition is a Poisson process with mean ``n*Lam``; its points are
    generated by time change: unit-rate exponential gaps, rescaled by ``1/n``
    and mapped through the inverse of ``Lam``.
    """
    model, n = cfg.model, cfg.n
    rng = _rng(cfg)
    total = float(model.Lam(np.array(1.0)))
    arrivals = []
    s = 0.0
    # draw gaps in blocks until the accumulated Lam-time exceeds Lam(1)
    block = max(16, int(n * total * 1.2) + 16)
    while True:
        gaps = rng.standard_exponential(block) / n
        cum = s + np.cumsum(gaps)
        arrivals.append(cum[cum <= total])
        if cum[-1] > total:
            break
        s = cum[-1]
    e = np.concatenate(arrivals)
    times = bisect_increasing(model.Lam, e, 0.0, 1.0)
    return _counting_step(times, n)


def sample_regression(cfg: SampleConfig) -> StepFunction:
    """Cumulative sums ``(1/n) sum_{i <= nt} y_i`` with ``y_i = lam(i/n) + eps_i``, Gaussian errors."""
    model, n = cfg.model, cfg.n
    x = np.arange(1, n + 1) / n
    sd = model.noise_sd or 0.0
    y = model.lam(x) + (sd * _rng(cfg).standard_normal(n) if sd > 0 else 0.0)
    return StepFunction(x, np.cumsum(y) / n, 0.0)


def nelson_aalen(times, events, horizon: float = 1.0) -> StepFunction:
    """Nelson-Aalen cumulative hazard restricted to ``[0, horizon]``.

    The ``i``-th order statistic (1-based) carries the jump ``events_i / (n - i + 1)``.
    """
    times = np.asarray(times, dtype=float)
    events = np.asarray(events, dtype=bool)
    order = np.argsort(times, kind="stable")
    x, d = times[order], events[order]
    at_risk = x.size - np.arange(x.size)
    keep = d & (x <= horizon)
    return StepFunction.from_jumps(x[keep], 1.0 / at_risk[keep])


def sample_censored(cfg: SampleConfig) -> StepFunction:
    """Nelson-Aalen estimate from right-censored failure times."""
    model, n = cfg.model, cfg.n
    F, G = model.failure_cdf, model.censor_cdf
    if F is None or G is None or model.censor_sampler is None:
        raise ModelMisconfigurationError(f"{model.name}: hazard models need F, G and a censoring sampler")
    grid = np.linspace(0.0, 1.0, 1001)
    for label, cdf in (("F", F), ("G", G)):
        v = cdf(grid)
        if np.any(np.diff(v) < 0) or v[0] < 0 or v[-1] >= 1:
            raise ModelMisconfigurationError(f"{model.name}: {label} must be a CDF with {label}(1) < 1")
    rng = _rng(cfg)
    e = rng.standard_exponential(n)
    # failure time = Lam^{-1}(E); the hazard is extended past 1 by its value at 1
    lam1, Lam1 = model.lam_min, float(model.Lam(np.array(1.0)))
    t = np.where(e <= Lam1, bisect_increasing(model.Lam, np.minimum(e, Lam1), 0.0, 1.0), 1.0 + (e - Lam1) / lam1)
    y = model.censor_sampler(rng, n)
    return nelson_aalen(np.minimum(t, y), t <= y)


_SAMPLERS = {
    "density": sample_density,
    "poisson": sample_poisson,
    "regression": sample_regression,
    "hazard": sample_censored,
}


def sample(cfg: SampleConfig) -> StepFunction:
    """Dispatch to the sampler matching ``cfg.model.kind``."""
    return _SAMPLERS[cfg.model.kind](cfg)


# ---------------------------------------------------------------------------
# self check


@dataclass
class SelfCheckReport:
    model: str
    inf_abs_dlam: float
    sup_abs_dlam: float
    holder_ratio: float
    max_inverse_error: float
    max_dL_rel_error: float
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def truth_selfcheck(model: TruthModel, grid_size: int = 10_000, raise_on_failure: bool = True) -> SelfCheckReport:
    """Check the regularity conditions of ``model`` on a uniform grid.

    Raises :class:`ModelInvalidError` listing every failed check unless
    ``raise_on_failure`` is false.
    """
    t = np.linspace(0.0, 1.0, grid_size)
    failures = []
    with np.errstate(all="ignore"):
        lam = model.lam(t)
        dlam = model.dlam(t)
        if not np.all(np.isfinite(lam)) or np.any(np.diff(lam) >= 0):
            failures.append("lam is not strictly decreasing")
        if not lam.min() > 0:
            failures.append(f"lam_min = {lam.min():g} is not positive")

        a = np.abs(dlam)
        inf_d, sup_d = float(a.min()), float(a.max())
        if not (inf_d > 0 and np.isfinite(sup_d)):
            failures.append(f"|dlam| bounds violated: inf={inf_d:g}, sup={sup_d:g}")

        inv_err = float(np.max(np.abs(model.lam_inv(lam) - t))) if lam.min() > 0 else np.inf
        if not inv_err <= 1e-10:
            failures.append(f"lam_inv(lam(t)) deviates from t by {inv_err:g}")

        h = 1e-5
        tc = t[(t >= h) & (t <= 1 - h)]
        fd = (model.L(tc + h) - model.L(tc - h)) / (2 * h)
        dL = model.dL(tc)
        rel = float(np.max(np.abs(fd - dL) / np.abs(dL)))
        if not rel < 1e-6:
            failures.append(f"dL disagrees with finite differences of L (rel err {rel:g})")
        if not np.all(model.dL(t) > 0):
            failures.append("dL is not strictly positive")

        s = model.holder_s
        if not s > 0.75:
            failures.append(f"Hoelder exponent {s} must exceed 3/4")
        rng = np.random.default_rng(0)
        i, j = rng.integers(0, grid_size, (2, 20_000))
        i, j = i[i != j], j[i != j]
        ratio = np.concatenate(
            (
                np.abs(np.diff(dlam)) / np.diff(t) ** s,
                np.abs(dlam[i] - dlam[j]) / np.abs(t[i] - t[j]) ** s,
            )
        )
        holder = float(ratio.max())
        if not np.isfinite(holder) or holder > 1e6:
            failures.append(f"Hoelder ratio of dlam unbounded ({holder:g})")

        if model.kind in ("density", "poisson"):
            if np.max(np.abs(model.L(t) - model.Lam(t))) > 1e-12:
                failures.append("L must equal Lam for density/poisson models")
        elif model.kind == "regression":
            sd = model.noise_sd
            if sd is None or sd <= 0 or np.max(np.abs(model.L(t) - t * sd**2)) > 1e-12:
                failures.append("L must equal t * noise_sd**2 for regression models")
        elif model.kind == "hazard":
            F, G = model.failure_cdf, model.censor_cdf
            if F is None or G is None:
                failures.append("hazard model needs failure and censoring CDFs")
            else:
                want = model.lam(t) / ((1 - F(t)) * (1 - G(t)))
                if np.max(np.abs(model.dL(t) - want) / want) > 1e-12:
                    failures.append("dL must equal lam / ((1 - F)(1 - G))")

    report = SelfCheckReport(model.name, inf_d, sup_d, holder, inv_err, rel, failures)
    if failures and raise_on_failure:
        raise ModelInvalidError(f"{model.name} failed self check: " + "; ".join(failures), failures)
    return report


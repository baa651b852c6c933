"""Seeded Monte Carlo experiments on the Hellinger loss of Grenander-type fits.

Three experiments share one replicate kernel (sample, fit, losses):

* ``clt``: standardised Hellinger statistic against N(0, 1) across sample sizes,
* ``lemma-decay``: rescaled cubic loss and the Hellinger / weighted-L2 gap,
* ``variance-constancy``: variance of ``n^(1/3) H`` for two density models.

Replicate ``r`` at sample size ``n`` draws from the stream derived from
``(seed, n, r)``, and records are sorted by ``(model, n, r)`` before writing, so
the files are identical for any number of workers.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy import special, stats

from .chernoff import ChernoffEstimates
from .exceptions import ConfigurationError, InvalidExperimentError
from .isotonic import grenander_fit, inverse_estimator
from .limits import LimitConstants, hellinger_limits
from .metrics import gap_bound_constant, loss_report
from .models import SampleConfig, get_model, sample
from .parallel import blocks, run_blocks

log = logging.getLogger(__name__)

SCHEMA = "grenlab-v1"
KINDS = ("clt", "lemma-decay", "variance-constancy")


@dataclass(frozen=True)
class ExperimentConfig:
    model_id: str
    n_grid: tuple[int, ...]
    replicates: int = 2000
    seed: int = 0
    constants_path: str | None = None
    output: str | None = None
    kind: str = "clt"
    models: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "models", tuple(self.models))
        if not self.n_grid:
            raise ConfigurationError("n_grid must not be empty")
        if any(n < 1 for n in self.n_grid) or list(self.n_grid) != sorted(set(self.n_grid)):
            raise ConfigurationError("n_grid must be strictly ascending positive integers")
        if self.replicates < 100:
            raise ConfigurationError("replicates must be >= 100")
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown experiment kind {self.kind!r}")


@dataclass(frozen=True)
class ReplicateRecord:
    model: str
    n: int
    replicate: int
    H: float
    scaled_stat: float | None
    scaled_sq: float
    cubic_scaled: float
    gap_scaled: float
    bound_ok: bool = field(default=True, compare=False)


@dataclass
class ExperimentResult:
    kind: str
    config: ExperimentConfig
    records: list[ReplicateRecord]
    summary: dict
    warnings: list[str] = field(default_factory=list)
    constants: dict | None = None


def ks_normal(samples) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``samples`` and N(0, 1)."""
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.size
    if m < 100:
        raise ConfigurationError(f"ks_normal needs at least 100 samples, got {m}")
    phi = 0.5 * special.erfc(-x / np.sqrt(2.0))
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - phi), np.max(phi - (i - 1) / m)))


def load_constants(path, model) -> tuple[LimitConstants, list[str]]:
    """Limit constants for ``model`` from a Chernoff-estimates or limit-constants file.

    A limit-constants file produced for a different model is accepted with a warning.
    """
    if path is None:
        raise ConfigurationError("a constants file is required for this experiment")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read constants file {path}: {exc}") from exc
    warnings = []
    if "mu_sq" in doc:
        lc = LimitConstants.from_dict(doc)
        src = lc.provenance.get("model")
        if src != model.name:
            warnings.append(f"constants were computed for model {src!r}, not {model.name!r}")
        return lc, warnings
    if "m2" in doc:
        return hellinger_limits(model, ChernoffEstimates.from_dict(doc)), warnings
    raise ConfigurationError(f"{path} is neither a Chernoff-estimates nor a limit-constants document")


def _switch_spot_check(step, est, rng, pairs: int = 3) -> None:
    lo, hi = est.levels.min(), est.levels.max()
    for t, a in zip(rng.uniform(0.0, 1.0, pairs), rng.uniform(lo - 0.1, hi + 0.1, pairs)):
        if est(t) > a and inverse_estimator(step, a) < t:
            raise AssertionError(f"switch relation violated at t={t}, a={a}")


def replicate(model, n: int, seed: int, r: int, mu_tilde: float | None = None) -> ReplicateRecord:
    """One sample, one fit, all losses; ``mu_tilde`` enables the centred statistic."""
    sample_ss, check_ss = np.random.SeedSequence(seed, spawn_key=(n, r)).spawn(2)
    step = sample(SampleConfig(model, n, sample_ss))
    est = grenander_fit(step, "non-increasing")
    _switch_spot_check(step, est, np.random.default_rng(check_ss))
    rep = loss_report(est, model)
    c = gap_bound_constant(model.lam_min)
    return ReplicateRecord(
        model=model.name,
        n=n,
        replicate=r,
        H=rep.hellinger,
        scaled_stat=None if mu_tilde is None else n ** (1 / 6) * (n ** (1 / 3) * rep.hellinger - mu_tilde),
        scaled_sq=n ** (2 / 3) * rep.hellinger_sq_x2,
        cubic_scaled=n ** (5 / 6) * rep.cubic,
        gap_scaled=n ** (5 / 6) * rep.gap,
        bound_ok=bool(rep.gap <= c * rep.cubic),
    )


def _replicate_block(args) -> list[ReplicateRecord]:
    model_id, n, seed, start, stop, mu_tilde = args
    model = get_model(model_id)
    return [replicate(model, n, seed, r, mu_tilde) for r in range(start, stop)]


def simulate(model_id: str, n_grid, replicates: int, seed: int, mu_tilde=None, workers=None) -> list[ReplicateRecord]:
    tasks = [
        (model_id, n, seed, s, e, mu_tilde)
        for n in n_grid
        for s, e in blocks(replicates, 100)
    ]
    records = [rec for chunk in run_blocks(_replicate_block, tasks, workers) for rec in chunk]
    records.sort(key=lambda rec: (rec.model, rec.n, rec.replicate))
    return records


def _by_n(records):
    out = {}
    for rec in records:
        out.setdefault(rec.n, []).append(rec)
    return out


def _summarize(records, sigma_tilde: float | None) -> dict:
    summary = {}
    for n, recs in _by_n(records).items():
        sq = np.array([r.scaled_sq for r in recs])
        row = {
            "replicates": len(recs),
            "mean_scaled_sq": float(sq.mean()),
            "var_scaled_sq": float(sq.var(ddof=1)),
            "median_cubic_scaled": float(np.median([r.cubic_scaled for r in recs])),
            "median_gap_scaled": float(np.median([r.gap_scaled for r in recs])),
            "gap_bound_violations": sum(not r.bound_ok for r in recs),
        }
        if sigma_tilde is not None:
            st = np.array([r.scaled_stat for r in recs])
            z = st / sigma_tilde
            row.update(
                mean_scaled_stat=float(st.mean()),
                var_scaled_stat=float(st.var(ddof=1)),
                ks_standard_normal=ks_normal(z),
                skewness=float(stats.skew(z)),
                kurtosis=float(stats.kurtosis(z)),
            )
        summary[str(n)] = row
    return summary


def run_clt(config: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Standardised ``n^(1/6) (n^(1/3) H - mu_tilde) / sigma_tilde`` for each ``n``.

    Centring and scale come from the limit constants, not from the sample.
    """
    model = get_model(config.model_id)
    constants, warnings = load_constants(config.constants_path, model)
    for w in warnings:
        log.warning(w)
    records = simulate(config.model_id, config.n_grid, config.replicates, config.seed, constants.mu_tilde, workers)
    summary = _summarize(records, constants.sigma_tilde)
    return ExperimentResult("clt", config, records, summary, warnings, constants.to_dict())


def run_lemma_decay(config: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Medians of ``n^(5/6) int|fit - lam|^3`` and ``n^(5/6) |2H^2 - weighted L2|``."""
    get_model(config.model_id)
    records = simulate(config.model_id, config.n_grid, config.replicates, config.seed, None, workers)
    return ExperimentResult("lemma-decay", config, records, _summarize(records, None))


def bootstrap_ratio_ci(x, y, resamples: int = 1000, level: float = 0.95, seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval for ``var(x) / var(y)``, resampling each sample separately."""
    rng = np.random.default_rng(seed)
    x, y = np.asarray(x), np.asarray(y)
    ix = rng.integers(0, x.size, (resamples, x.size))
    iy = rng.integers(0, y.size, (resamples, y.size))
    ratios = x[ix].var(axis=1, ddof=1) / y[iy].var(axis=1, ddof=1)
    alpha = (1 - level) / 2
    lo, hi = np.quantile(ratios, [alpha, 1 - alpha])
    return float(lo), float(hi)


def run_variance_constancy(config: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Compare the variance of ``n^(1/3) H`` at the largest ``n`` for two density models."""
    if len(config.models) != 2:
        raise InvalidExperimentError("variance constancy compares exactly two models")
    models = [get_model(m) for m in config.models]
    for m in models:
        if m.kind != "density":
            raise InvalidExperimentError(f"{m.name} is not a density model")
    n = config.n_grid[-1]
    records, scaled, theory, warnings = [], [], {}, []
    for mid, m in zip(config.models, models):
        recs = simulate(mid, (n,), config.replicates, config.seed, None, workers)
        records.extend(recs)
        scaled.append(np.array([n ** (1 / 3) * r.H for r in recs]))
        if config.constants_path is not None:
            lc, w = load_constants(config.constants_path, m)
            warnings.extend(w)
            theory[mid] = lc.sigma_tilde_sq
    records.sort(key=lambda rec: (rec.model, rec.n, rec.replicate))
    v1, v2 = (float(s.var(ddof=1)) for s in scaled)
    lo, hi = bootstrap_ratio_ci(scaled[0], scaled[1], seed=config.seed)
    summary = {
        "n": n,
        "models": list(config.models),
        "var_scaled_H": dict(zip(config.models, (v1, v2))),
        "variance_ratio": v1 / v2,
        "ratio_ci95": [lo, hi],
        "ci_contains_one": bool(lo <= 1.0 <= hi),
    }
    if theory:
        summary["sigma_tilde_sq"] = theory
    return ExperimentResult("variance-constancy", config, records, summary, warnings)


RUNNERS = {"clt": run_clt, "lemma-decay": run_lemma_decay, "variance-constancy": run_variance_constancy}


def run(config: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    return RUNNERS[config.kind](config, workers)


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".summary.json")


def write_records(result: ExperimentResult, path) -> Path:
    """Write the records CSV and its JSON summary sidecar; returns the sidecar path.

    ``scaled_stat`` is only a column when the experiment is centred.
    """
    names = [f.name for f in fields(ReplicateRecord) if f.name != "bound_ok"]
    if any(r.scaled_stat is None for r in result.records):
        names.remove("scaled_stat")
    with open(path, "w", newline="") as fh:
        for w in result.warnings:
            fh.write(f"# warning: {w}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for rec in result.records:
            writer.writerow([_fmt(getattr(rec, k)) for k in names])
    side = sidecar_path(path)
    doc = {
        "schema": SCHEMA,
        "experiment": result.kind,
        "config": asdict(result.config),
        "summary": result.summary,
        "warnings": result.warnings,
        "constants": result.constants,
    }
    with open(side, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return side

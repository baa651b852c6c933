"""Limiting mean and variance of the squared Hellinger loss and of the loss itself."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import ConfigurationError, ModelInvalidError
from .models import TruthModel

PANELS = 128
ORDER = 10
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(ORDER)


def composite_gauss_legendre(f, panels: int = PANELS) -> float:
    """``int_0^1 f`` with ``panels`` equal panels of 10-point Gauss-Legendre."""
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    x = (0.5 * (edges[1:] + edges[:-1]))[:, None] + half[:, None] * _NODES
    vals = f(x)
    if not np.all(np.isfinite(vals)):
        raise ModelInvalidError("non-finite integrand in limit constants", ["non-finite integrand"])
    return float(np.sum(half * (vals @ _WEIGHTS)))


def _drift(truth: TruthModel, t):
    return np.abs(truth.dlam(t) * truth.dL(t)) ** (2.0 / 3.0)


def mu_squared(truth: TruthModel, m2: float, panels: int = PANELS) -> float:
    """``m2 * int |lam' L'|^(2/3) / (2^(2/3) lam)``."""
    if not m2 > 0:
        raise ConfigurationError("m2 must be positive")
    with np.errstate(all="ignore"):
        integral = composite_gauss_legendre(lambda t: _drift(truth, t) / truth.lam(t), panels)
    return m2 * 2.0 ** (-2.0 / 3.0) * integral


def sigma_squared(truth: TruthModel, k2: float, panels: int = PANELS) -> float:
    """``2^(1/3) k2 int |lam' L'|^(2/3) L' / lam^2``."""
    with np.errstate(all="ignore"):
        integral = composite_gauss_legendre(lambda t: _drift(truth, t) * truth.dL(t) / truth.lam(t) ** 2, panels)
    return 2.0 ** (1.0 / 3.0) * k2 * integral


@dataclass(frozen=True)
class LimitConstants:
    mu_sq: float
    sigma_sq: float
    mu_tilde: float
    sigma_tilde_sq: float
    provenance: dict = field(default_factory=dict)

    @property
    def sigma_tilde(self) -> float:
        return float(np.sqrt(self.sigma_tilde_sq))

    def to_dict(self) -> dict:
        return {"schema": "grenlab-v1", **asdict(self)}

    @classmethod
    def from_dict(cls, d: dict) -> LimitConstants:
        try:
            return cls(
                float(d["mu_sq"]),
                float(d["sigma_sq"]),
                float(d["mu_tilde"]),
                float(d["sigma_tilde_sq"]),
                dict(d.get("provenance", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed limit constants document: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def limit_constants(truth: TruthModel, m2: float, k2: float, provenance: dict | None = None) -> LimitConstants:
    """Centering and variance for ``n^(1/3) H`` from those of ``n^(2/3) * 2H^2``.

    Delta method with ``x -> sqrt(x / 2)``: ``mu_tilde = mu / sqrt(2)`` and
    ``sigma_tilde^2 = sigma^2 / (8 mu^2)``.
    """
    mu_sq = mu_squared(truth, m2)
    sigma_sq = sigma_squared(truth, k2)
    if not (mu_sq > 0 and sigma_sq > 0):
        raise ModelInvalidError("limit constants must be positive", ["non-positive constant"])
    prov = {"model": truth.name, **(provenance or {})}
    return LimitConstants(mu_sq, sigma_sq, float(np.sqrt(mu_sq / 2.0)), sigma_sq / (8.0 * mu_sq), prov)


def hellinger_limits(truth: TruthModel, est) -> LimitConstants:
    """:func:`limit_constants` fed from a :class:`~grenlab.chernoff.ChernoffEstimates`."""
    return limit_constants(truth, est.m2, est.k2, {"chernoff": asdict(est.config)})

"""Portfolio constructors.

Five basic books (risk parity, naive Markowitz, agnostic risk parity,
trend-on-risk-parity, equally weighted), the generalized signal-weight
matrix, volatility targeting and convex mixing.  Constructors return
unit-gross positions by default; pass normalize=False for the raw linear
form (linear in the signal), and use vol_target to set the actual size.

Cross-asset conventions: cov is the asset covariance, corr its unit-diagonal
rescaling, vols the per-asset volatility vector, classes the asset-class
labels.  The static target vector puts weight on stocks and bonds only;
FX enters risk parity books only through inverse-covariance cross terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import symmat
from .errors import (
    CannotScale,
    DegenerateVolatility,
    InvalidInput,
    ZeroTargetVector,
)


@dataclass(frozen=True)
class PortfolioWeights:
    positions: np.ndarray
    kind: str
    gross: float = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        if not np.isfinite(p).all():
            raise InvalidInput("positions contain non-finite entries")
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "gross", float(np.abs(p).sum()))


@dataclass(frozen=True)
class WeightMatrix:
    """n x n map from signals to positions, with its trend/drift gains."""

    weights: np.ndarray
    trend_gain: float
    drift_gain: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or not np.isfinite(w).all():
            raise InvalidInput("weights must be a finite square matrix")
        object.__setattr__(self, "weights", w)


def _finish(raw: np.ndarray, kind: str, normalize: bool) -> PortfolioWeights:
    raw = np.asarray(raw, dtype=float)
    if normalize:
        gross = np.abs(raw).sum()
        if gross > 0.0:
            raw = raw / gross
    return PortfolioWeights(positions=raw, kind=kind)


def class_target(classes) -> np.ndarray:
    """Static target vector: 1 for stocks and bonds, 0 for FX."""
    return np.array([0.0 if c == "fx" else 1.0 for c in classes])


def _vols_vector(vols, n: int) -> np.ndarray:
    v = np.asarray(vols, dtype=float)
    if v.ndim == 2:
        v = np.diag(v)
    if v.shape != (n,):
        raise InvalidInput(f"expected {n} volatilities, got shape {v.shape}")
    return v


def risk_parity(cov, vols, classes, ridge=None, normalize=True) -> PortfolioWeights:
    """Static book: inverse covariance applied to the vol-weighted class target."""
    cov = np.asarray(cov, dtype=float)
    v = _vols_vector(vols, cov.shape[0])
    target = class_target(classes)
    if not target.any():
        raise ZeroTargetVector("all-FX universe has no risk-parity target")
    raw = symmat.inverse(cov, ridge) @ (v * target)
    return _finish(raw, "rp", normalize)


def naive_markowitz(cov, signal, ridge=None, normalize=True) -> PortfolioWeights:
    """Inverse covariance applied to the trend signal."""
    raw = symmat.inverse(np.asarray(cov, dtype=float), ridge) @ np.asarray(signal, dtype=float)
    return _finish(raw, "nm", normalize)


def agnostic_risk_parity(corr, vols, signal, ridge=None, normalize=True) -> PortfolioWeights:
    """Inverse-vol sandwich around the inverse square root of the correlation."""
    corr = np.asarray(corr, dtype=float)
    v = _vols_vector(vols, corr.shape[0])
    if v.min() <= 0.0:
        raise DegenerateVolatility(f"non-positive volatility {v.min():.3e}")
    s = np.asarray(signal, dtype=float)
    raw = (symmat.inv_sqrt(corr, ridge) @ (s / v)) / v
    return _finish(raw, "arp", normalize)


def trend_on_risk_parity(cov, vols, signal, classes, ridge=None, normalize=True) -> PortfolioWeights:
    """Risk-parity book traded long or short by the signal projected on it."""
    cov = np.asarray(cov, dtype=float)
    v = _vols_vector(vols, cov.shape[0])
    target = class_target(classes)
    if not target.any():
        raise ZeroTargetVector("all-FX universe has no risk-parity target")
    inv = symmat.inverse(cov, ridge)
    book = inv @ (v * target)
    projection = float((v * target) @ inv @ np.asarray(signal, dtype=float))
    return _finish(projection * book, "torp", normalize)


def equally_weighted(vols, classes=None, normalize=True) -> PortfolioWeights:
    """Equal volatility-adjusted exposure on every asset, FX included."""
    v = np.asarray(vols, dtype=float)
    if v.ndim == 2:
        v = np.diag(v)
    if v.min() <= 0.0:
        raise DegenerateVolatility(f"non-positive volatility {v.min():.3e}")
    return _finish(1.0 / v, "ew", normalize)


def optimal_weight_matrix(cov, trend_cov, drift_outer, trend_gain, drift_gain, ridge=None) -> WeightMatrix:
    """Approximate optimal signal weights: inv(cov) (g_t*trend_cov + g_d*drift_outer) inv(cov)."""
    cov = np.asarray(cov, dtype=float)
    trend_cov = np.asarray(trend_cov, dtype=float)
    drift_outer = np.asarray(drift_outer, dtype=float)
    if trend_cov.shape != cov.shape or drift_outer.shape != cov.shape:
        raise InvalidInput("cov, trend_cov and drift_outer must share one shape")
    inv = symmat.inverse(cov, ridge)
    core = trend_gain * trend_cov + drift_gain * drift_outer
    return WeightMatrix(weights=inv @ core @ inv, trend_gain=trend_gain, drift_gain=drift_gain)


def positions_from_matrix(matrix: WeightMatrix, signal) -> PortfolioWeights:
    """Apply the weight matrix to a signal vector; no normalization."""
    s = np.asarray(signal, dtype=float)
    if s.shape != (matrix.weights.shape[0],):
        raise InvalidInput(f"signal shape {s.shape} != ({matrix.weights.shape[0]},)")
    return PortfolioWeights(positions=matrix.weights @ s, kind="omega")


def vol_target(weights: PortfolioWeights, cov, target: float) -> PortfolioWeights:
    """Rescale positions so the portfolio volatility under cov equals target."""
    if target <= 0.0:
        raise InvalidInput(f"target must be positive, got {target}")
    p = weights.positions
    variance = float(p @ np.asarray(cov, dtype=float) @ p)
    if variance <= 0.0:
        raise CannotScale(f"portfolio variance {variance:.3e} cannot be scaled to {target}")
    return PortfolioWeights(positions=p * (target / np.sqrt(variance)), kind=weights.kind)


def mix(portfolios, coefficients, cov, allow_short=False) -> PortfolioWeights:
    """Convex combination of books, each volatility-targeted to 1 first."""
    if len(portfolios) != len(coefficients) or not portfolios:
        raise InvalidInput("need one coefficient per portfolio")
    w = np.asarray(coefficients, dtype=float)
    if abs(w.sum() - 1.0) > 1e-8:
        raise InvalidInput(f"coefficients must sum to 1, got {w.sum()}")
    if not allow_short and w.min() < 0.0:
        raise InvalidInput("negative strategy weights require allow_short=True")
    combined = sum(
        c * vol_target(p, cov, 1.0).positions for c, p in zip(w, portfolios)
    )
    return PortfolioWeights(positions=combined, kind="mix")

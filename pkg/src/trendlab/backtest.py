"""Dated strategy pipeline over a returns panel.

Each day the engine first builds positions from estimator and signal state
that has only seen returns up to the previous day, then realizes the P&L
against the current day's returns, and only then folds the day into the
estimators.  Weekly return sums feed the correlation estimate every
week_len days; per-asset vols come from the daily variance EMA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import estimation, portfolios, signals
from .errors import DegenerateResult, InsufficientData, InvalidInput
from .market_model import ReturnsPanel
from .symmat import eigendecompose

TRADING_DAYS = 252.0

STRATEGY_KINDS = ("rp", "nm", "arp", "torp", "ew", "zero")


@dataclass(frozen=True)
class StrategyConfig:
    """Strategy id plus every estimator knob of the pipeline.

    vol_scale=None trades unit-gross positions (P&L scales linearly with the
    panel); a float rescales positions daily to that conditional volatility
    under the estimated covariance.
    """

    kind: str
    signal_rate: float = 0.01
    cov_rate: float = estimation.DEFAULT_COV_RATE
    var_rate: float = estimation.DEFAULT_VAR_RATE
    cleaner: str = "rie"
    sample_ratio: float | None = None
    ridge: float | None = None
    vol_scale: float | None = None
    week_len: int = 5
    warmup: int | None = None

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise InvalidInput(f"unknown strategy {self.kind!r}, expected one of {STRATEGY_KINDS}")
        if self.cleaner not in estimation.CLEANERS:
            raise InvalidInput(f"unknown cleaner {self.cleaner!r}")
        if self.week_len < 1:
            raise InvalidInput("week_len must be >= 1")
        if self.warmup is not None and self.warmup < self.week_len:
            raise InvalidInput("warm-up must cover at least one weekly update")

    def warmup_days(self) -> int:
        """Signal warm-up or covariance warm-up, whichever is longer."""
        if self.warmup is not None:
            return self.warmup
        signal_days = math.ceil(2.0 / self.signal_rate)
        cov_days = self.week_len * math.ceil(2.0 / self.cov_rate)
        return max(signal_days, cov_days)


@dataclass(frozen=True)
class BacktestResult:
    pnl: np.ndarray
    positions: np.ndarray | None
    warmup: int
    strategy: str = ""

    @property
    def active_pnl(self) -> np.ndarray:
        return self.pnl[self.warmup :]

    @property
    def sharpe(self) -> float:
        """Annualized Sharpe ratio over post-warmup days."""
        pnl = self.active_pnl
        std = float(pnl.std(ddof=1)) if len(pnl) > 1 else 0.0
        if std <= 0.0:
            raise DegenerateResult(f"P&L of {self.strategy or 'strategy'} has zero variance")
        return float(pnl.mean()) / std * math.sqrt(TRADING_DAYS)


def _positions(cfg: StrategyConfig, corr, vols, sig, classes) -> np.ndarray:
    if cfg.kind == "zero":
        return np.zeros(len(vols))
    cov = corr * np.outer(vols, vols)
    if cfg.kind == "ew":
        book = portfolios.equally_weighted(vols)
    elif cfg.kind == "rp":
        book = portfolios.risk_parity(cov, vols, classes, cfg.ridge)
    elif cfg.kind == "nm":
        book = portfolios.naive_markowitz(cov, sig, cfg.ridge)
    elif cfg.kind == "arp":
        book = portfolios.agnostic_risk_parity(corr, vols, sig, cfg.ridge)
    else:
        book = portfolios.trend_on_risk_parity(cov, vols, sig, classes, cfg.ridge)
    if cfg.vol_scale is not None and book.gross > 0.0:
        book = portfolios.vol_target(book, cov, cfg.vol_scale)
    return book.positions


def run(panel: ReturnsPanel, cfg: StrategyConfig) -> BacktestResult:
    """Run one strategy over the panel; pre-warmup days carry zero positions."""
    n_days, n = panel.returns.shape
    warmup = cfg.warmup_days()
    if n_days <= warmup:
        raise InsufficientData(f"panel of {n_days} days does not clear warm-up {warmup}")

    sig_state = signals.SignalState.initial(cfg.signal_rate, n)
    cov_state = estimation.CovarianceState(n=n, cov_rate=cfg.cov_rate, var_rate=cfg.var_rate)
    sample_ratio = cfg.sample_ratio
    if sample_ratio is None:
        sample_ratio = estimation.default_sample_ratio(n, cfg.cov_rate)
    clean = estimation.CLEANERS[cfg.cleaner]

    pnl = np.zeros(n_days)
    positions = np.zeros((n_days, n))
    corr = None
    for t in range(1, n_days + 1):
        r = panel.returns[t - 1]
        if t > warmup:
            pos = _positions(cfg, corr, estimation.volatilities(cov_state),
                             sig_state.values, panel.asset_classes)
            positions[t - 1] = pos
            pnl[t - 1] = float(r @ pos)
        sig_state = signals.update(sig_state, r)
        cov_state = estimation.update_daily(cov_state, r)
        if t % cfg.week_len == 0:
            cov_state = estimation.roll_week(cov_state)
            corr = clean(estimation.correlation(cov_state), sample_ratio)
    return BacktestResult(pnl=pnl, positions=positions, warmup=warmup, strategy=cfg.kind)


def pipeline_estimates(panel: ReturnsPanel, cfg: StrategyConfig) -> tuple[np.ndarray, np.ndarray]:
    """Cleaned correlation and daily vols the pipeline holds after the whole panel."""
    cov_state = estimation.CovarianceState(n=panel.n_assets, cov_rate=cfg.cov_rate,
                                           var_rate=cfg.var_rate)
    sample_ratio = cfg.sample_ratio
    if sample_ratio is None:
        sample_ratio = estimation.default_sample_ratio(panel.n_assets, cfg.cov_rate)
    for t in range(1, panel.n_days + 1):
        cov_state = estimation.update_daily(cov_state, panel.returns[t - 1])
        if t % cfg.week_len == 0:
            cov_state = estimation.roll_week(cov_state)
    corr = estimation.CLEANERS[cfg.cleaner](estimation.correlation(cov_state), sample_ratio)
    return corr, estimation.volatilities(cov_state)


def estimate_correlation(panel: ReturnsPanel, cfg: StrategyConfig) -> np.ndarray:
    return pipeline_estimates(panel, cfg)[0]


@dataclass(frozen=True)
class EigenRiskProfile:
    eigenvalues: np.ndarray
    risks: np.ndarray


def realized_risk(result: BacktestResult, corr: np.ndarray, panel: ReturnsPanel) -> EigenRiskProfile:
    """Realized P&L risk carried by each eigenmode of the given correlation.

    Positions and returns are projected on the correlation eigenvectors in
    vol-rescaled units; the per-mode P&L contributions sum to the total P&L
    exactly, and their standard deviations form the risk profile.
    """
    if result.positions is None:
        raise InvalidInput("result carries no positions history")
    pairs = eigendecompose(corr)
    active = slice(result.warmup, None)
    rets = panel.returns[active]
    pos = result.positions[active]
    vols = rets.std(axis=0, ddof=1)
    mode_returns = (rets / vols) @ pairs.eigenvectors
    mode_exposures = (pos * vols) @ pairs.eigenvectors
    per_mode = mode_exposures * mode_returns
    return EigenRiskProfile(
        eigenvalues=pairs.eigenvalues,
        risks=per_mode.std(axis=0, ddof=1),
    )


def _aligned_active(results) -> np.ndarray:
    if len(results) < 1:
        raise InvalidInput("need at least one result")
    series = [np.asarray(r.active_pnl, dtype=float) for r in results]
    length = len(series[0])
    if any(len(s) != length for s in series):
        raise InvalidInput("P&L series are not aligned")
    return np.column_stack(series)


def strategy_correlations(results) -> np.ndarray:
    """Pairwise Pearson correlations of the daily P&L series."""
    x = _aligned_active(results)
    if x.std(axis=0).min() <= 0.0:
        raise DegenerateResult("a P&L series has zero variance")
    return np.corrcoef(x, rowvar=False).reshape(x.shape[1], x.shape[1])


@dataclass(frozen=True)
class MixResult:
    weights: np.ndarray
    sharpe: float
    labels: tuple[str, ...]


def _mix_sharpe(x: np.ndarray, w: np.ndarray) -> float:
    series = x @ w
    std = series.std(ddof=1)
    if std <= 0.0:
        return -np.inf
    return float(series.mean() / std * math.sqrt(TRADING_DAYS))


def _project_simplex(v: np.ndarray) -> np.ndarray:
    # Euclidean projection onto {w >= 0, sum w = 1}
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.clip(v - theta, 0.0, None)


def optimal_mix(results, seed: int = 0, starts: int = 16, iters: int = 400) -> MixResult:
    """In-sample Sharpe-optimal convex combination of unit-vol P&L series.

    Projected gradient ascent on the simplex from multiple starts (every
    vertex, the uniform point, and random draws); ties at the optimum are
    broken toward the uniform split.
    """
    if len(results) < 2:
        raise InvalidInput("need at least two strategies to mix")
    x = _aligned_active(results)
    stds = x.std(axis=0, ddof=1)
    if stds.min() <= 0.0:
        raise DegenerateResult("cannot mix a zero-variance P&L series")
    x = x / stds
    m = x.shape[1]

    rng = np.random.default_rng(seed)
    candidates = [np.full(m, 1.0 / m)]
    candidates += [np.eye(m)[i] for i in range(m)]
    candidates += [rng.dirichlet(np.ones(m)) for _ in range(starts)]

    mu = x.mean(axis=0)
    cov = np.cov(x, rowvar=False, ddof=1).reshape(m, m)
    best_w, best_s = None, -np.inf
    for w0 in candidates:
        w = w0.copy()
        step = 0.5
        s_prev = _mix_sharpe(x, w)
        for _ in range(iters):
            denom = float(w @ cov @ w)
            if denom <= 0.0:
                break
            sigma = math.sqrt(denom)
            grad = mu / sigma - float(mu @ w) * (cov @ w) / denom**1.5
            w_new = _project_simplex(w + step * grad)
            s_new = _mix_sharpe(x, w_new)
            if s_new < s_prev:
                step *= 0.5
                if step < 1e-12:
                    break
                continue
            if s_new - s_prev < 1e-14:
                w = w_new
                break
            w, s_prev = w_new, s_new
        s_final = _mix_sharpe(x, w)
        if s_final > best_s:
            best_w, best_s = w, s_final

    uniform = np.full(m, 1.0 / m)
    if _mix_sharpe(x, uniform) >= best_s - 1e-12:
        best_w, best_s = uniform, _mix_sharpe(x, uniform)
    labels = tuple(getattr(r, "strategy", "") or str(i) for i, r in enumerate(results))
    return MixResult(weights=best_w, sharpe=best_s, labels=labels)


def sweep_mix_curve(results, step: float = 0.01) -> tuple[np.ndarray, np.ndarray]:
    """Sharpe of the two-strategy mix along the weight grid of the second one."""
    if len(results) != 2:
        raise InvalidInput("sweep needs exactly two strategies")
    if not 0.0 < step <= 0.5:
        raise InvalidInput(f"grid step must be in (0, 0.5], got {step}")
    x = _aligned_active(results)
    stds = x.std(axis=0, ddof=1)
    if stds.min() <= 0.0:
        raise DegenerateResult("cannot mix a zero-variance P&L series")
    x = x / stds
    grid = np.arange(0.0, 1.0 + 0.5 * step, step)
    grid[-1] = 1.0
    sharpes = np.array([_mix_sharpe(x, np.array([1.0 - w, w])) for w in grid])
    return grid, sharpes

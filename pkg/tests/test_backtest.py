import numpy as np
import pytest

from helpers import market_trend_model, rand_spd
from trendlab import backtest as bt
from trendlab import estimation, portfolios, signals
from trendlab.errors import DegenerateResult, InsufficientData, InvalidInput
from trendlab.market_model import ModelParams, ReturnsPanel, simulate

FAST = dict(signal_rate=0.05, cov_rate=0.05, var_rate=0.05)


def white_panel(seed, days, n, drift=0.0, sigma=1.0):
    rng = np.random.default_rng(seed)
    returns = drift + sigma * rng.standard_normal((days, n))
    return ReturnsPanel(returns=returns, asset_classes=("stock",) * n, seed=seed)


def fake_result(pnl, name="x"):
    return bt.BacktestResult(pnl=np.asarray(pnl, float), positions=None, warmup=0, strategy=name)


def test_constant_book_on_drifted_noise_recovers_analytic_sharpe():
    params = ModelParams(n=1, drift=np.array([0.05]), noise_cov=np.array([[1.0]]),
                         trend_cov=np.zeros((1, 1)), trend_amp=0.0, trend_decay=0.5)
    panel = simulate(params, 100_000, 0)
    res = bt.run(panel, bt.StrategyConfig(kind="ew", warmup=100, **FAST))
    want = 0.05 * np.sqrt(252)
    se = np.sqrt((1.0 + 0.5 * 0.05**2) / len(res.active_pnl)) * np.sqrt(252)
    assert abs(res.sharpe - want) < 3 * se


def test_zero_strategy_has_undefined_sharpe():
    res = bt.run(white_panel(1, 400, 2), bt.StrategyConfig(kind="zero", warmup=50, **FAST))
    assert np.array_equal(res.pnl, np.zeros(400))
    with pytest.raises(DegenerateResult):
        res.sharpe


def test_panel_must_clear_warmup():
    with pytest.raises(InsufficientData):
        bt.run(white_panel(2, 100, 2), bt.StrategyConfig(kind="ew", warmup=100, **FAST))


def test_strict_causality():
    panel = white_panel(3, 300, 3)
    bumped = panel.returns.copy()
    day = 200
    bumped[day] += 5.0
    cfg = bt.StrategyConfig(kind="nm", warmup=60, **FAST)
    a = bt.run(panel, cfg)
    b = bt.run(ReturnsPanel(returns=bumped, asset_classes=panel.asset_classes), cfg)
    assert np.array_equal(a.positions[: day + 1], b.positions[: day + 1])
    assert not np.array_equal(a.positions[day + 1:], b.positions[day + 1:])


@pytest.mark.parametrize("kind", ["rp", "nm", "arp", "torp", "ew"])
def test_doubling_returns_doubles_pnl(kind):
    panel = white_panel(4, 400, 3, drift=0.01)
    cfg = bt.StrategyConfig(kind=kind, warmup=60, **FAST)
    a = bt.run(panel, cfg)
    b = bt.run(ReturnsPanel(returns=2.0 * panel.returns,
                            asset_classes=panel.asset_classes), cfg)
    scale = np.abs(a.pnl).max()
    assert np.abs(b.pnl - 2.0 * a.pnl).max() < 1e-8 * max(scale, 1.0)
    assert b.sharpe == pytest.approx(a.sharpe, rel=1e-8)


def test_backtest_positions_match_portfolio_constructors():
    """The engine must place exactly the book the constructors define."""
    panel = white_panel(5, 200, 3)
    cfg = bt.StrategyConfig(kind="arp", warmup=50, **FAST)
    res = bt.run(panel, cfg)

    sig = signals.SignalState.initial(cfg.signal_rate, 3)
    cov = estimation.CovarianceState(n=3, cov_rate=cfg.cov_rate, var_rate=cfg.var_rate)
    corr = None
    ratio = estimation.default_sample_ratio(3, cfg.cov_rate)
    for t in range(1, 201):
        r = panel.returns[t - 1]
        if t > 50:
            book = portfolios.agnostic_risk_parity(corr, estimation.volatilities(cov),
                                                   sig.values)
            assert np.abs(book.positions - res.positions[t - 1]).max() < 1e-12
        sig = signals.update(sig, r)
        cov = estimation.update_daily(cov, r)
        if t % cfg.week_len == 0:
            cov = estimation.roll_week(cov)
            corr = estimation.rie_clean(estimation.correlation(cov), ratio)


def test_vol_scaled_run_hits_conditional_target():
    panel = white_panel(6, 300, 2)
    cfg = bt.StrategyConfig(kind="ew", warmup=50, vol_scale=0.02, **FAST)
    res = bt.run(panel, cfg)
    active = res.positions[50:]
    assert (np.abs(active).sum(axis=1) > 0).all()
    # per-day conditional risk under the estimated covariance equals the target
    sig = None
    cov = estimation.CovarianceState(n=2, cov_rate=0.05, var_rate=0.05)
    corr = None
    ratio = estimation.default_sample_ratio(2, 0.05)
    for t in range(1, 301):
        if t > 50:
            vols = estimation.volatilities(cov)
            c = corr * np.outer(vols, vols)
            p = res.positions[t - 1]
            assert np.sqrt(p @ c @ p) == pytest.approx(0.02, rel=1e-10)
        cov = estimation.update_daily(cov, panel.returns[t - 1])
        if t % 5 == 0:
            cov = estimation.roll_week(cov)
            corr = estimation.rie_clean(estimation.correlation(cov), ratio)


def test_trend_on_market_mode_beats_markowitz():
    params = market_trend_model()
    wins = 0
    for seed in range(3):
        panel = simulate(params, 4000, 100 + seed)
        sh = {}
        for kind in ("torp", "nm"):
            sh[kind] = bt.run(panel, bt.StrategyConfig(kind=kind, cov_rate=0.01)).sharpe
        wins += sh["torp"] > sh["nm"]
    assert wins >= 2


def test_realized_risk_decomposition_is_exact():
    panel = white_panel(7, 400, 3)
    res = bt.run(panel, bt.StrategyConfig(kind="nm", warmup=60, **FAST))
    corr = np.corrcoef(panel.returns[60:], rowvar=False)
    profile = bt.realized_risk(res, corr, panel)
    assert profile.eigenvalues.shape == profile.risks.shape == (3,)
    assert (profile.risks >= 0).all()
    # per-mode contributions sum back to the total P&L
    from trendlab.symmat import eigendecompose
    pairs = eigendecompose(corr)
    rets = panel.returns[60:]
    vols = rets.std(axis=0, ddof=1)
    per_mode = (((res.positions[60:] * vols) @ pairs.eigenvectors)
                * ((rets / vols) @ pairs.eigenvectors))
    assert np.abs(per_mode.sum(axis=1) - res.pnl[60:]).max() < 1e-10


def test_realized_risk_static_book_closed_form():
    rng = np.random.default_rng(8)
    cov = rand_spd(rng, 4)
    panel = ReturnsPanel(returns=rng.standard_normal((5000, 4)) @ np.linalg.cholesky(cov).T,
                         asset_classes=("stock",) * 4)
    res = bt.run(panel, bt.StrategyConfig(kind="ew", warmup=200, **FAST))
    d = 1 / np.sqrt(np.diag(cov))
    corr = cov * np.outer(d, d)
    np.fill_diagonal(corr, 1.0)
    profile = bt.realized_risk(res, corr, panel)
    from trendlab.symmat import eigendecompose
    pairs = eigendecompose(corr)
    ones = np.ones(4)
    want = np.abs(pairs.eigenvectors.T @ ones) * np.sqrt(pairs.eigenvalues)
    got = profile.risks / profile.risks.mean()
    assert np.abs(got - want / want.mean()).max() < 0.15


def test_strategy_correlations():
    rng = np.random.default_rng(9)
    a = fake_result(rng.standard_normal(10_000))
    same = bt.strategy_correlations([a, a])
    assert np.allclose(same, np.ones((2, 2)))
    b = fake_result(rng.standard_normal(10_000))
    corr = bt.strategy_correlations([a, b])
    assert abs(corr[0, 1]) < 0.03
    with pytest.raises(InvalidInput):
        bt.strategy_correlations([a, fake_result(np.zeros(5))])
    with pytest.raises(DegenerateResult):
        bt.strategy_correlations([a, fake_result(np.zeros(10_000))])


def grid_oracle(x, step=0.01):
    """Exhaustive simplex search for two series, the reference for optimal_mix."""
    x = x / x.std(axis=0, ddof=1)
    best = -np.inf
    for w in np.arange(0.0, 1.0 + step / 2, step):
        mix = (1 - w) * x[:, 0] + w * x[:, 1]
        best = max(best, mix.mean() / mix.std(ddof=1) * np.sqrt(252))
    return best


def test_optimal_mix_identical_series_ties_to_even_split():
    rng = np.random.default_rng(10)
    pnl = rng.standard_normal(5000) + 0.03
    mix = bt.optimal_mix([fake_result(pnl, "a"), fake_result(pnl, "b")])
    assert np.allclose(mix.weights, [0.5, 0.5])
    assert mix.sharpe == pytest.approx(fake_result(pnl).sharpe, rel=1e-12)


def test_optimal_mix_dominates_components_and_grid():
    rng = np.random.default_rng(11)
    good = fake_result(rng.standard_normal(20_000) + 0.0629, "good")   # sharpe ~ 1
    noise = fake_result(rng.standard_normal(20_000), "noise")
    mix = bt.optimal_mix([good, noise], seed=1)
    singles = [good.sharpe, noise.sharpe]
    assert mix.sharpe >= max(singles) - 1e-9
    x = np.column_stack([good.pnl, noise.pnl])
    assert mix.sharpe >= grid_oracle(x) - 1e-6
    assert mix.sharpe >= 1.0 - 0.25  # close to the good component's level


def test_optimal_mix_equal_uncorrelated_components():
    rng = np.random.default_rng(12)
    mu = 0.5  # large mean so the in-sample optimum sits on the population one
    a = fake_result(rng.standard_normal(200_000) + mu, "a")
    b = fake_result(rng.standard_normal(200_000) + mu, "b")
    mix = bt.optimal_mix([a, b], seed=2)
    assert np.abs(mix.weights - 0.5).max() < 0.01
    # exact in-sample optimum of two series: w proportional to inv(cov) mean
    x = np.column_stack([a.pnl, b.pnl])
    x = x / x.std(axis=0, ddof=1)
    exact = np.linalg.solve(np.cov(x, rowvar=False, ddof=1), x.mean(axis=0))
    exact = exact / exact.sum()
    assert np.abs(mix.weights - exact).max() < 1e-3
    assert mix.sharpe == pytest.approx(np.sqrt(2) * mu * np.sqrt(252), rel=0.05)
    with pytest.raises(InvalidInput):
        bt.optimal_mix([a])
    with pytest.raises(DegenerateResult):
        bt.optimal_mix([a, fake_result(np.full(200_000, 1.0))])


def test_mix_invariant_to_component_rescaling():
    rng = np.random.default_rng(15)
    a = fake_result(rng.standard_normal(20_000) + 0.02, "a")
    b = fake_result(rng.standard_normal(20_000) + 0.04, "b")
    scaled = fake_result(137.0 * a.pnl, "a")  # same book traded at another size
    base = bt.optimal_mix([a, b], seed=4)
    other = bt.optimal_mix([scaled, b], seed=4)
    assert base.sharpe == pytest.approx(other.sharpe, rel=1e-12)
    assert np.abs(base.weights - other.weights).max() < 1e-12


def test_sweep_mix_curve():
    rng = np.random.default_rng(13)
    a = fake_result(0.5 * rng.standard_normal(30_000) + 0.02, "a")
    b = fake_result(2.0 * rng.standard_normal(30_000) + 0.01, "b")
    grid, sharpes = bt.sweep_mix_curve([a, b], step=0.01)
    assert len(grid) == 101 and grid[0] == 0.0 and grid[-1] == 1.0
    assert sharpes[0] == pytest.approx(a.sharpe, rel=1e-12)
    assert sharpes[-1] == pytest.approx(b.sharpe, rel=1e-12)
    assert np.abs(np.diff(sharpes)).max() < 0.1
    mix = bt.optimal_mix([a, b], seed=3)
    assert mix.sharpe >= sharpes.max() - 1e-9
    assert abs(mix.weights[1] - grid[np.argmax(sharpes)]) <= 0.01 + 1e-9
    with pytest.raises(InvalidInput):
        bt.sweep_mix_curve([a, b, a])


def test_estimate_correlation_shape():
    panel = white_panel(14, 300, 3)
    corr = bt.estimate_correlation(panel, bt.StrategyConfig(kind="ew", **FAST))
    assert np.abs(np.diag(corr) - 1.0).max() < 1e-10
    assert np.array_equal(corr, corr.T)


def test_strategy_config_validation():
    with pytest.raises(InvalidInput):
        bt.StrategyConfig(kind="bogus")
    with pytest.raises(InvalidInput):
        bt.StrategyConfig(kind="ew", cleaner="magic")
    with pytest.raises(InvalidInput):
        bt.StrategyConfig(kind="ew", warmup=2, week_len=5)
    assert bt.StrategyConfig(kind="ew").warmup_days() == 7500
    assert bt.StrategyConfig(kind="ew", signal_rate=0.01, cov_rate=0.01).warmup_days() == 1000

"""Trend-following portfolio lab.

Synthetic correlated-trend markets, EMA signals, online covariance estimation
with spectral cleaning, the basic trend portfolios and their optimal mixing,
a backtest engine, an analytic squared-Sharpe oracle at small scale, and an
interacting-agents herding simulator.
"""

__version__ = "0.1.0"

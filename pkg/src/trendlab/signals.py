"""Linear trend signals: per-asset EMA of past returns plus its mass scalar.

The signal available at time t is sum_{t'<t} (1-rate)^(t-t'-1) r_{t'};
updating with the day-t return produces the signal for t+1, so a state never
sees the return it will be traded against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


@dataclass(frozen=True)
class SignalState:
    rate: float
    values: np.ndarray
    t: int

    @classmethod
    def initial(cls, rate: float, n: int) -> "SignalState":
        if not 0.0 < rate < 1.0:
            raise InvalidInput(f"rate must be in (0,1), got {rate}")
        if n < 1:
            raise InvalidInput("need at least one asset")
        return cls(rate=rate, values=np.zeros(n), t=1)


def update(state: SignalState, r: np.ndarray) -> SignalState:
    """Fold one day of returns into the EMA; returns the state for t+1."""
    r = np.asarray(r, dtype=float)
    if r.shape != state.values.shape:
        raise InvalidInput(f"return vector shape {r.shape} != {state.values.shape}")
    if not np.isfinite(r).all():
        raise InvalidInput("returns contain non-finite entries")
    return SignalState(
        rate=state.rate,
        values=(1.0 - state.rate) * state.values + r,
        t=state.t + 1,
    )


def signal_mass(rate: float, t: int) -> float:
    """Sum of the EMA kernel weights at time t: (1 - (1-rate)^(t-1)) / rate."""
    if t < 1:
        raise InvalidInput(f"time index must be >= 1, got {t}")
    return (1.0 - (1.0 - rate) ** (t - 1)) / rate

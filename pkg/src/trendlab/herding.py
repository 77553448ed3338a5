"""Interacting-agents model of strategy herding.

Each of A agents holds one of N strategies.  Every step an agent scores each
strategy by its own fixed Gaussian preference plus a constant coupling times
the number of current adopters, then switches to the argmax; all agents
update synchronously and an agent's own adoption counts toward the total.
Above a critical coupling a single dominant strategy emerges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


@dataclass(frozen=True)
class AgentSimParams:
    agents: int
    strategies: int
    coupling: float  # intrinsic amplitude j; the per-adopter coupling is j*sqrt(N)/A
    steps: int
    reps: int
    seed: int = 0

    def __post_init__(self):
        if min(self.agents, self.strategies, self.steps, self.reps) < 1:
            raise InvalidInput("agents, strategies, steps and reps must all be >= 1")
        if self.coupling < 0.0:
            raise InvalidInput(f"coupling must be non-negative, got {self.coupling}")

    @property
    def per_adopter_coupling(self) -> float:
        return self.coupling * np.sqrt(self.strategies) / self.agents


@dataclass(frozen=True)
class AgentState:
    """One-hot adoption matrix (A x N, one strategy per agent) and fixed preferences."""

    adoption: np.ndarray
    preferences: np.ndarray

    def __post_init__(self):
        adoption = np.asarray(self.adoption)
        prefs = np.asarray(self.preferences, dtype=float)
        if adoption.shape != prefs.shape or adoption.ndim != 2:
            raise InvalidInput("adoption and preferences must share an A x N shape")
        if not ((adoption == 0) | (adoption == 1)).all() or (adoption.sum(axis=1) != 1).any():
            raise InvalidInput("each adoption row must be one-hot")
        object.__setattr__(self, "adoption", adoption.astype(np.int8))
        object.__setattr__(self, "preferences", prefs)

    @property
    def choices(self) -> np.ndarray:
        return self.adoption.argmax(axis=1)


def _one_hot(choices: np.ndarray, n_strategies: int) -> np.ndarray:
    out = np.zeros((len(choices), n_strategies), dtype=np.int8)
    out[np.arange(len(choices)), choices] = 1
    return out


def _next_choices(preferences: np.ndarray, counts: np.ndarray, coupling: float) -> np.ndarray:
    scores = preferences + coupling * counts[None, :]
    return scores.argmax(axis=1)  # argmax breaks ties toward the lowest index


def step(state: AgentState, coupling: float) -> AgentState:
    """Synchronous re-evaluation of every agent at the given per-adopter coupling."""
    counts = state.adoption.sum(axis=0).astype(float)
    choices = _next_choices(state.preferences, counts, coupling)
    return AgentState(
        adoption=_one_hot(choices, state.adoption.shape[1]),
        preferences=state.preferences,
    )


def initial_state(rng: np.random.Generator, agents: int, strategies: int) -> AgentState:
    """Fresh Gaussian preferences and a uniformly random strategy per agent."""
    prefs = rng.standard_normal((agents, strategies))
    choices = rng.integers(0, strategies, size=agents)
    return AgentState(adoption=_one_hot(choices, strategies), preferences=prefs)


@dataclass(frozen=True)
class SimResult:
    """Adoption counts per (rep, step, strategy) plus the derived fractions.

    counts are integers, so row-stochasticity is exact: counts.sum(axis=2)
    equals the number of agents at every step of every repetition.
    """

    counts: np.ndarray
    agents: int

    @property
    def fractions(self) -> np.ndarray:
        """Per-run adopted fraction of each strategy over time."""
        return self.counts / self.agents

    @property
    def mean_fraction(self) -> np.ndarray:
        """Average interest per strategy over repetitions, (steps+1) x N."""
        return self.counts.mean(axis=0) / self.agents


def run(params: AgentSimParams) -> SimResult:
    """Monte-Carlo runs with fresh preferences and initial adoption each rep."""
    coupling = params.per_adopter_coupling
    seeds = np.random.SeedSequence(params.seed).spawn(params.reps)
    counts = np.zeros((params.reps, params.steps + 1, params.strategies), dtype=np.int64)
    for rep, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        state_prefs = rng.standard_normal((params.agents, params.strategies))
        choices = rng.integers(0, params.strategies, size=params.agents)
        counts[rep, 0] = np.bincount(choices, minlength=params.strategies)
        for t in range(1, params.steps + 1):
            step_counts = counts[rep, t - 1].astype(float)
            choices = _next_choices(state_prefs, step_counts, coupling)
            counts[rep, t] = np.bincount(choices, minlength=params.strategies)
    return SimResult(counts=counts, agents=params.agents)


@dataclass(frozen=True)
class TransitionCurve:
    couplings: np.ndarray
    max_fraction: np.ndarray
    stderr: np.ndarray


def transition_curve(params: AgentSimParams, coupling_grid) -> TransitionCurve:
    """Steady-state average maximal fraction per coupling.

    The winning strategy differs from run to run (the symmetry breaks
    spontaneously), so dominance is measured per run: each repetition
    contributes max_k of its own final adopted fractions, and the curve
    reports the mean and standard error of that maximum over repetitions.
    """
    grid = np.asarray(coupling_grid, dtype=float)
    if grid.size == 0:
        raise InvalidInput("coupling grid is empty")
    maxima = np.empty(grid.size)
    stderr = np.empty(grid.size)
    for i, j in enumerate(grid):
        result = run(AgentSimParams(
            agents=params.agents,
            strategies=params.strategies,
            coupling=float(j),
            steps=params.steps,
            reps=params.reps,
            seed=params.seed + i,
        ))
        per_run = result.fractions[:, -1, :].max(axis=1)
        maxima[i] = per_run.mean()
        stderr[i] = per_run.std(ddof=1) / np.sqrt(params.reps) if params.reps > 1 else 0.0
    return TransitionCurve(couplings=grid, max_fraction=maxima, stderr=stderr)

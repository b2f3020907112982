"""Repeated play: best-response and fictitious-play engines.

A Schedule is a list of decision epochs, each freezing a prefix of the
horizon (realized intervals can no longer be revised). Both engines
record full-horizon round states; convergence and small-period
oscillation are detected on the joint action sequence.
"""

from dataclasses import dataclass

import numpy as np

from .actions import FrozenPrefix, restrict_library
from .allocation import total_cost
from .bestresponse import (
    BeliefProfile,
    OpponentBelief,
    SolverParams,
    best_response_continuous,
    best_response_finite,
    expected_best_response_finite,
)
from .model import InfeasibleActionError, ScenarioError, system_load
from .rng import derive_rng


@dataclass(frozen=True)
class Schedule:
    """Decision epochs; freeze_map[k] intervals are realized at epoch k."""

    freeze_map: tuple

    def __post_init__(self):
        freeze = tuple(int(f) for f in self.freeze_map)
        object.__setattr__(self, "freeze_map", freeze)
        if freeze:
            if freeze[0] != 0:
                raise ScenarioError("the first epoch must freeze nothing")
            if any(b < a for a, b in zip(freeze, freeze[1:])):
                raise ScenarioError("freeze map must be non-decreasing")

    @property
    def n_epochs(self):
        return len(self.freeze_map)


def make_rolling_schedule(grid):
    """One epoch per interval; each decision precedes its interval."""
    return Schedule(freeze_map=tuple(range(grid.interval_count)))


def make_day_ahead_schedule():
    """A single full-horizon decision with no freezing."""
    return Schedule(freeze_map=(0,))


def make_repeated_schedule(n_rounds):
    """Repeated full-horizon play without freezing (iterated one-shot game)."""
    return Schedule(freeze_map=(0,) * n_rounds)


@dataclass(frozen=True)
class RoundState:
    round_index: int
    actions: np.ndarray  # (n_agents, n_intervals) shift vectors
    action_indices: tuple  # canonical library indices, or None in continuous mode
    profile: object  # SystemProfile of the scheduled full-horizon load
    charges: tuple  # per-agent ChargeBreakdown
    holds: tuple  # agents that kept their action for lack of alternatives


@dataclass(frozen=True)
class ConvergenceResult:
    converged_at: int = None
    oscillation_period: int = None


@dataclass
class Trajectory:
    dynamics: str  # "brd" | "fpd"
    rounds: list
    peak_series: np.ndarray
    convergence: ConvergenceResult
    diagnostics: tuple = ()

    @property
    def final_profile(self):
        return self.rounds[-1].profile

    @property
    def final_actions(self):
        return self.rounds[-1].actions


def detect_convergence(rounds, window=6, tol=1e-6):
    """Classify the tail of a joint action sequence.

    Converged at the earliest update round from which the joint action
    never changes again (an untouched initial state converges at round
    1), provided the stable stretch spans at least `window` states.
    Otherwise the last `window` states are scanned for the smallest
    period p <= window // 2.
    """
    if isinstance(rounds, Trajectory):
        rounds = rounds.rounds
    states = [np.asarray(r.actions if isinstance(r, RoundState) else r) for r in rounds]
    last = len(states) - 1
    if len(states) < 2:
        return ConvergenceResult()

    unchanged = [
        bool(np.max(np.abs(states[k] - states[k - 1])) <= tol)
        for k in range(1, len(states))
    ]
    last_change = 0
    for k in range(1, len(states)):
        if not unchanged[k - 1]:
            last_change = k
    settle = max(last_change, 1)
    if last - settle + 1 >= window:
        return ConvergenceResult(converged_at=settle)

    if len(states) >= window:
        tail = states[-window:]
        for period in range(2, window // 2 + 1):
            if all(
                np.max(np.abs(tail[k] - tail[k - period])) <= tol
                for k in range(period, window)
            ):
                return ConvergenceResult(oscillation_period=period)
    return ConvergenceResult()


def _init_state(scenario, libraries, init):
    n = scenario.n_agents
    t = scenario.grid.interval_count
    if libraries is not None:
        if len(libraries) != n:
            raise ScenarioError("one action library per agent required")
        indices = [0] * n if init is None else [int(i) for i in init]
        actions = np.array(
            [lib.deltas[i] for lib, i in zip(libraries, indices)]
        )
        return actions, indices
    if init is None:
        return np.zeros((n, t)), None
    actions = np.array(init, dtype=float)
    if actions.shape != (n, t):
        raise ScenarioError(f"init must be ({n}, {t}) shift vectors")
    return actions.copy(), None


def _record(scenario, round_index, actions, indices, holds):
    profile = system_load(scenario, list(actions))
    charges = tuple(
        total_cost(agent, action, profile, scenario)
        for agent, action in zip(scenario.agents, actions)
    )
    return RoundState(
        round_index=round_index,
        actions=actions.copy(),
        action_indices=None if indices is None else tuple(indices),
        profile=profile,
        charges=charges,
        holds=tuple(holds),
    )


def _opponent_totals(scenario, actions):
    """Baseline + everyone's consumption; subtract one agent to get their view."""
    total = scenario.baseline.copy()
    for agent, action in zip(scenario.agents, actions):
        total += agent.baseline + action
    return total


def _finalize(dynamics, scenario, states, diagnostics):
    peaks = np.array([s.profile.peak_value for s in states])
    return Trajectory(
        dynamics=dynamics,
        rounds=states,
        peak_series=peaks,
        convergence=detect_convergence(states),
        diagnostics=tuple(diagnostics),
    )


def run_brd(scenario, schedule, libraries=None, init=None,
            update_mode="simultaneous", params=None):
    """Best-response dynamics over the schedule.

    Finite mode (libraries given): each agent picks the cheapest
    prefix-consistent library entry against the opponents' reference
    actions. Continuous mode: the candidate-peak solver. simultaneous
    reads the previous round throughout; round_robin reads the freshest
    actions in ascending agent order.
    """
    if update_mode not in ("simultaneous", "round_robin"):
        raise ScenarioError(f"unknown update mode: {update_mode}")
    params = params or SolverParams()
    actions, indices = _init_state(scenario, libraries, init)
    holds = [False] * scenario.n_agents
    states = [_record(scenario, 0, actions, indices, holds)]
    diagnostics = []

    for epoch, frozen_through in enumerate(schedule.freeze_map):
        live = actions if update_mode == "round_robin" else actions.copy()
        new_actions = actions.copy()
        new_indices = None if indices is None else list(indices)
        holds = [False] * scenario.n_agents
        totals = _opponent_totals(scenario, live)
        for i, agent in enumerate(scenario.agents):
            frozen = FrozenPrefix.of_action(agent, actions[i], frozen_through)
            opponent = totals - (agent.baseline + live[i])
            if libraries is not None:
                try:
                    lib = restrict_library(libraries[i], frozen)
                except InfeasibleActionError:
                    holds[i] = True
                    diagnostics.append(f"round {epoch + 1}: {agent.id} held (no continuation)")
                    continue
                pick, _ = best_response_finite(agent, lib, opponent, scenario)
                chosen = lib.deltas[pick]
                new_indices[i] = int(lib.source_indices[pick])
            else:
                chosen, held = best_response_continuous(
                    agent, opponent, frozen, scenario, params, current=actions[i]
                )
                if held:
                    holds[i] = True
            if update_mode == "round_robin":
                totals += chosen - live[i]
                live[i] = chosen
            new_actions[i] = chosen
        actions = new_actions
        indices = new_indices
        states.append(_record(scenario, epoch + 1, actions, indices, holds))
    return _finalize("brd", scenario, states, diagnostics)


def run_fpd(scenario, schedule, libraries=None, init=None, params=None):
    """Fictitious-play dynamics over the schedule.

    Finite mode: beliefs are the empirical frequencies of each opponent's
    past library choices (initial action included); agents minimize
    expected cost and keep their previous entry on exact ties. Continuous
    mode: each opponent is summarized by the arithmetic mean of their
    past shift vectors.
    """
    params = params or SolverParams()
    actions, indices = _init_state(scenario, libraries, init)
    n = scenario.n_agents
    holds = [False] * n
    states = [_record(scenario, 0, actions, indices, holds)]
    diagnostics = []

    index_history = [list(indices)] if libraries is not None else None
    action_sums = actions.copy()

    for epoch, frozen_through in enumerate(schedule.freeze_map):
        rounds_seen = epoch + 1
        new_actions = actions.copy()
        new_indices = None if indices is None else list(indices)
        holds = [False] * n
        for i, agent in enumerate(scenario.agents):
            frozen = FrozenPrefix.of_action(agent, actions[i], frozen_through)
            if libraries is not None:
                try:
                    lib = restrict_library(libraries[i], frozen)
                except InfeasibleActionError:
                    holds[i] = True
                    diagnostics.append(f"round {epoch + 1}: {agent.id} held (no continuation)")
                    continue
                beliefs = _empirical_beliefs(scenario, libraries, index_history, i)
                prefer = int(np.flatnonzero(lib.source_indices == indices[i])[0])
                rng = derive_rng(params.rng_seed, epoch + 1, i)
                pick = expected_best_response_finite(
                    agent, lib, beliefs, scenario, params, rng=rng, prefer_index=prefer
                )
                new_actions[i] = lib.deltas[pick]
                new_indices[i] = int(lib.source_indices[pick])
            else:
                means = action_sums / rounds_seen
                opponent = scenario.baseline.copy()
                for j, other in enumerate(scenario.agents):
                    if j != i:
                        opponent += other.baseline + means[j]
                chosen, held = best_response_continuous(
                    agent, opponent, frozen, scenario, params, current=actions[i]
                )
                new_actions[i] = chosen
                if held:
                    holds[i] = True
        actions = new_actions
        indices = new_indices
        if index_history is not None:
            index_history.append(list(indices))
        action_sums += actions
        states.append(_record(scenario, epoch + 1, actions, indices, holds))
    return _finalize("fpd", scenario, states, diagnostics)


def _empirical_beliefs(scenario, libraries, index_history, agent_index):
    """Frequencies of every opponent's past plays, as consumption profiles."""
    opponents = []
    rounds = len(index_history)
    for j, (agent, lib) in enumerate(zip(scenario.agents, libraries)):
        if j == agent_index:
            continue
        played = [history[j] for history in index_history]
        support, counts = np.unique(played, return_counts=True)
        profiles = agent.baseline[None, :] + lib.deltas[support]
        opponents.append(
            OpponentBelief(
                agent_id=agent.id,
                profiles=np.ascontiguousarray(profiles),
                probs=counts / rounds,
            )
        )
    return BeliefProfile(opponents=tuple(opponents))

"""Best responses against opponent load profiles.

An opponent aggregate is the non-responsive baseline plus every other
agent's consumption, per interval. Finite best responses scan a library;
expected best responses average over a product belief; the continuous
solver runs a candidate-peak search with exact re-evaluation.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .actions import validate_action
from .allocation import total_cost
from .model import InfeasibleActionError, SystemProfile


@dataclass(frozen=True)
class SolverParams:
    """Knobs for the search and expectation machinery.

    tie_tolerance None means "use the scenario's". Expectations enumerate
    the full product support up to exact_expectation_limit joint
    outcomes, then switch to Monte Carlo.
    """

    v_grid_points: int = 101
    tie_tolerance: float = None
    mc_samples: int = 200
    exact_expectation_limit: int = 100000
    rng_seed: int = 0

    def __post_init__(self):
        if self.v_grid_points < 2:
            raise ValueError("v_grid_points must be at least 2")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be at least 1")

    def tol(self, scenario):
        return scenario.tie_tolerance if self.tie_tolerance is None else self.tie_tolerance


@dataclass(frozen=True)
class OpponentBelief:
    """Discrete distribution over one opponent's consumption profiles."""

    agent_id: str
    profiles: np.ndarray  # (n_support, n_intervals) consumption vectors
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape[0] != self.profiles.shape[0]:
            raise ValueError("one probability per support profile required")
        if abs(float(probs.sum()) - 1.0) > 1e-9:
            raise ValueError(f"belief about {self.agent_id} does not sum to 1")


@dataclass(frozen=True)
class BeliefProfile:
    """Independent beliefs about every opponent (a product distribution)."""

    opponents: tuple

    def support_size(self):
        size = 1
        for belief in self.opponents:
            size *= belief.profiles.shape[0]
        return size


def opponent_aggregate(scenario, actions, agent_index):
    """Baseline plus everyone else's consumption."""
    load = scenario.baseline.copy()
    for j, (agent, action) in enumerate(zip(scenario.agents, actions)):
        if j != agent_index:
            load += agent.baseline + np.asarray(action, dtype=float)
    return load


def evaluate_cost(agent, action, opponent_load, scenario):
    """Exact tie-aware cost of one action against a fixed opponent load."""
    action = np.asarray(action, dtype=float)
    profile = SystemProfile.from_values(
        opponent_load + agent.baseline + action, scenario.tie_tolerance
    )
    return total_cost(agent, action, profile, scenario)


def best_response_finite(agent, library, opponent_load, scenario):
    """Lowest-cost library entry; ties go to the lowest index."""
    totals = kernels.total_costs_batch(
        library.deltas,
        agent.baseline,
        np.ascontiguousarray(opponent_load, dtype=float),
        scenario.prices,
        scenario.charge_total,
        scenario.tie_tolerance,
    )
    index = int(np.argmin(totals))
    return index, evaluate_cost(agent, library.deltas[index], opponent_load, scenario)


def _belief_outcomes(scenario, beliefs, params, rng):
    """Joint opponent profiles and weights, deduplicated.

    Full product enumeration while the joint support is small, seeded
    Monte Carlo otherwise.
    """
    base = scenario.baseline[None, :].copy()
    if not beliefs.opponents:
        return base, np.ones(1)
    if beliefs.support_size() <= params.exact_expectation_limit:
        profiles = base
        weights = np.ones(1)
        for belief in beliefs.opponents:
            k = belief.profiles.shape[0]
            profiles = (profiles[:, None, :] + belief.profiles[None, :, :]).reshape(
                -1, base.shape[1]
            )
            weights = (weights[:, None] * np.asarray(belief.probs)[None, :]).ravel()
    else:
        if rng is None:
            rng = np.random.default_rng(params.rng_seed)
        n = params.mc_samples
        profiles = np.repeat(base, n, axis=0)
        for belief in beliefs.opponents:
            draws = rng.choice(belief.profiles.shape[0], size=n, p=belief.probs)
            profiles += belief.profiles[draws]
        weights = np.full(n, 1.0 / n)
    unique, inverse = np.unique(profiles, axis=0, return_inverse=True)
    merged = np.zeros(unique.shape[0])
    np.add.at(merged, inverse, weights)
    return unique, merged


def expected_best_response_finite(
    agent, library, beliefs, scenario, params, rng=None, prefer_index=None
):
    """Library entry minimizing expected cost under the product belief.

    Ties go to prefer_index when it attains the minimum (inertia), else
    to the lowest index.
    """
    profiles, weights = _belief_outcomes(scenario, beliefs, params, rng)
    totals = kernels.expected_total_costs_batch(
        library.deltas,
        agent.baseline,
        np.ascontiguousarray(profiles),
        weights,
        scenario.prices,
        scenario.charge_total,
        params.tol(scenario),
    )
    index = int(np.argmin(totals))
    if prefer_index is not None and totals[prefer_index] == totals[index]:
        return int(prefer_index)
    return index


def best_response_continuous(
    agent, opponent_load, frozen, scenario, params, current=None
):
    """Candidate-peak search over the agent's remaining free intervals.

    Returns (action, held). The current action, when supplied, is always
    a candidate and wins exact cost ties, so the result is never worse
    than holding. held=True means nothing else feasible was found.
    """
    opponent_load = np.ascontiguousarray(opponent_load, dtype=float)
    initial_x = None
    if current is not None:
        current = np.asarray(current, dtype=float)
        if not validate_action(agent, current, frozen):
            raise InfeasibleActionError(
                f"agent {agent.id}: held action is not prefix-consistent"
            )
        initial_x = agent.baseline + current
    best_x, _ = kernels.continuous_search(
        opponent_load,
        scenario.prices,
        np.ascontiguousarray(frozen.values, dtype=float),
        agent.lower_bound,
        agent.upper_bound,
        agent.energy_budget,
        params.v_grid_points,
        scenario.charge_total,
        params.tol(scenario),
        initial_x,
    )
    if best_x is None:
        if current is not None:
            return current, True
        raise InfeasibleActionError(
            f"agent {agent.id}: no feasible continuation from the frozen prefix"
        )
    held = initial_x is not None and np.array_equal(best_x, initial_x)
    return best_x - agent.baseline, held


def brute_force_oracle(agent, opponent_load, scenario, grid_step, frozen=None):
    """Exhaustive grid search over the feasible set (testing oracle).

    Shift values on every free interval but the last run over multiples
    of grid_step; the last interval is pinned by energy balance and only
    checked against the bounds. At most 4 free intervals.
    """
    n = agent.baseline.shape[0]
    h = frozen.frozen_through if frozen is not None else 0
    free = list(range(h, n))
    if len(free) > 4:
        raise ValueError("brute-force oracle limited to 4 free intervals")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")

    frozen_part = frozen.values if frozen is not None else np.empty(0)
    residual = agent.energy_budget - float(frozen_part.sum())
    opponent_load = np.ascontiguousarray(opponent_load, dtype=float)

    if not free:
        x = frozen_part.copy()
        return x - agent.baseline

    axes = []
    for t in free[:-1]:
        lo = agent.lower_bound - agent.baseline[t]
        hi = agent.upper_bound - agent.baseline[t]
        ks = np.arange(np.ceil(lo / grid_step - 1e-12), np.floor(hi / grid_step + 1e-12) + 1)
        axes.append(ks * grid_step)
    if axes:
        mesh = np.meshgrid(*axes, indexing="ij")
        head = np.stack([m.ravel() for m in mesh], axis=1)
    else:
        head = np.zeros((1, 0))

    free_base = agent.baseline[free]
    last_delta = (residual - free_base.sum()) - head.sum(axis=1)
    x_last = free_base[-1] + last_delta
    ok = (x_last >= agent.lower_bound - 1e-9) & (x_last <= agent.upper_bound + 1e-9)
    head = head[ok]
    last_delta = last_delta[ok]
    if head.shape[0] == 0:
        raise InfeasibleActionError("oracle grid found no feasible point")

    deltas = np.zeros((head.shape[0], n))
    deltas[:, :h] = frozen_part[None, :] - agent.baseline[:h][None, :]
    deltas[:, free[:-1]] = head
    deltas[:, free[-1]] = last_delta

    best_cost = np.inf
    best_row = 0
    chunk = 65536
    for start in range(0, deltas.shape[0], chunk):
        totals = kernels.total_costs_batch(
            np.ascontiguousarray(deltas[start : start + chunk]),
            agent.baseline,
            opponent_load,
            scenario.prices,
            scenario.charge_total,
            scenario.tie_tolerance,
        )
        k = int(np.argmin(totals))
        if totals[k] < best_cost:
            best_cost = float(totals[k])
            best_row = start + k
    return deltas[best_row]

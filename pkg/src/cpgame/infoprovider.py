"""Information providers: ranked peak alerts and rank-conditioned responses.

A provider broadcasts the 8 most likely peak intervals. Responders shed
their baseline fully at ranks 1-2, half at rank 3, and half at a random
3 of ranks 4-8, refilling the energy into the cheapest non-ranked
intervals. The response-aware provider ranks the profile projected after
everyone follows the naive advice.
"""

from dataclasses import dataclass

import numpy as np

from .actions import refill_lowest_price, validate_action
from .metrics import peak_reduction
from .model import InfeasibleActionError, ScenarioError, system_load
from .rng import derive_rng

RANKED_COUNT = 8
FULL_RANKS = 2  # ranks 1-2: shed everything
HALF_RANK = 1  # rank 3: shed half
RANDOM_POOL = 5  # ranks 4-8 ...
RANDOM_PICKS = 3  # ... of which 3 shed half


@dataclass(frozen=True)
class IPRanking:
    ranked_intervals: tuple  # 0-based, rank 1 first
    provider_kind: str  # "naive" | "response_aware"

    def __post_init__(self):
        ranked = tuple(int(t) for t in self.ranked_intervals)
        object.__setattr__(self, "ranked_intervals", ranked)
        if len(ranked) != RANKED_COUNT or len(set(ranked)) != RANKED_COUNT:
            raise ScenarioError(f"ranking must list {RANKED_COUNT} distinct intervals")


@dataclass(frozen=True)
class PopulationMix:
    """How many agents follow the response-aware provider, and run count."""

    n_agents: int
    aware_fraction: float
    runs: int = 20
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.aware_fraction <= 1.0:
            raise ScenarioError("aware fraction must lie in [0, 1]")
        if self.runs < 1:
            raise ScenarioError("at least one run required")

    @property
    def n_aware(self):
        """Aware agents are assigned by ascending roster position."""
        return int(round(self.aware_fraction * self.n_agents))


@dataclass(frozen=True)
class IPopulationResult:
    aware_fraction: float
    reductions_pct: np.ndarray  # one entry per run
    scale_down_count: int

    @property
    def mean_pct(self):
        return float(self.reductions_pct.mean())

    @property
    def std_pct(self):
        return float(self.reductions_pct.std())


def naive_ranking(baseline_profile):
    """Top 8 intervals of the observed profile, ties by ascending index."""
    baseline_profile = np.asarray(baseline_profile, dtype=float)
    if baseline_profile.shape[0] < RANKED_COUNT:
        raise ScenarioError(f"profile shorter than {RANKED_COUNT} intervals")
    order = np.argsort(-baseline_profile, kind="stable")
    return IPRanking(ranked_intervals=tuple(order[:RANKED_COUNT]), provider_kind="naive")


def _curtail_depths(agent, ranking, weights):
    """Per-interval shed depth, clipped so consumption stays above the floor."""
    depths = np.zeros(agent.baseline.shape[0])
    for interval, w in zip(ranking.ranked_intervals, weights):
        room = agent.baseline[interval] - agent.lower_bound
        depths[interval] = min(w * agent.baseline[interval], max(room, 0.0))
    return depths


def _response_deltas(agent, ranking, weights, prices):
    """Shed by rank weights, refill cheapest-first outside the ranked set.

    Curtailment scales down proportionally when the non-ranked headroom
    cannot absorb it. Returns (deltas, scaled_down).
    """
    depths = _curtail_depths(agent, ranking, weights)
    headroom = agent.upper_bound - agent.baseline
    ranked = list(ranking.ranked_intervals)
    capacity = float(np.delete(headroom, ranked).sum())
    total = float(depths.sum())
    scaled = False
    if total > capacity:
        depths *= capacity / total if total > 0 else 0.0
        total = capacity
        scaled = True
    refill = refill_lowest_price(total, prices, headroom, excluded=ranked)
    return refill - depths, scaled


def responder_action(agent, ranking, rng, scenario):
    """Realized rank-conditioned response with the random 3-of-5 draw."""
    weights = np.zeros(RANKED_COUNT)
    weights[:FULL_RANKS] = 1.0
    weights[FULL_RANKS : FULL_RANKS + HALF_RANK] = 0.5
    picks = rng.choice(RANDOM_POOL, size=RANDOM_PICKS, replace=False)
    weights[FULL_RANKS + HALF_RANK + np.sort(picks)] = 0.5
    deltas, scaled = _response_deltas(agent, ranking, weights, scenario.prices)
    if not validate_action(agent, deltas):
        raise InfeasibleActionError(f"agent {agent.id}: responder action infeasible")
    return deltas, scaled


def expected_responder_deltas(agent, ranking, scenario):
    """Response with the random component replaced by its expectation."""
    weights = np.zeros(RANKED_COUNT)
    weights[:FULL_RANKS] = 1.0
    weights[FULL_RANKS : FULL_RANKS + HALF_RANK] = 0.5
    weights[FULL_RANKS + HALF_RANK :] = 0.5 * RANDOM_PICKS / RANDOM_POOL
    deltas, _ = _response_deltas(agent, ranking, weights, scenario.prices)
    return deltas


def response_aware_ranking(scenario, naive):
    """Re-rank after projecting everyone's expected response to the naive list."""
    projected = scenario.baseline.copy()
    for agent in scenario.agents:
        projected += agent.baseline + expected_responder_deltas(agent, naive, scenario)
    order = np.argsort(-projected, kind="stable")
    return IPRanking(
        ranked_intervals=tuple(order[:RANKED_COUNT]), provider_kind="response_aware"
    )


def run_ip_population(scenario, mix):
    """Mixed-population one-shot experiment, averaged over seeded runs.

    The first mix.n_aware agents follow the response-aware ranking, the
    rest follow the naive one; all respond simultaneously. Each run r
    draws agent randomness from streams (seed, r, agent).
    """
    if mix.n_agents != scenario.n_agents:
        raise ScenarioError("population mix size differs from the scenario roster")
    initial = scenario.initial_profile()
    naive = naive_ranking(initial)
    aware = response_aware_ranking(scenario, naive)
    reductions = np.empty(mix.runs)
    scale_downs = 0
    for run in range(mix.runs):
        responses = []
        for i, agent in enumerate(scenario.agents):
            ranking = aware if i < mix.n_aware else naive
            deltas, scaled = responder_action(
                agent, ranking, derive_rng(mix.seed, run, i), scenario
            )
            scale_downs += scaled
            responses.append(deltas)
        profile = system_load(scenario, responses)
        reductions[run] = peak_reduction(initial, profile.values)
    return IPopulationResult(
        aware_fraction=mix.aware_fraction,
        reductions_pct=reductions,
        scale_down_count=scale_downs,
    )


def ip_initial_actions(scenario, mix, run):
    """One-shot responses usable as the starting point of a dynamics run."""
    initial = scenario.initial_profile()
    naive = naive_ranking(initial)
    aware = response_aware_ranking(scenario, naive)
    actions = []
    for i, agent in enumerate(scenario.agents):
        ranking = aware if i < mix.n_aware else naive
        deltas, _ = responder_action(agent, ranking, derive_rng(mix.seed, run, i), scenario)
        actions.append(deltas)
    return np.array(actions)

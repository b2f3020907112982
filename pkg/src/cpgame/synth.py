"""Synthetic system data and scenario presets.

The day generator stands in for a proprietary peak-day series: a smooth
demand curve with a morning trough and a flat-topped afternoon peak
block, and a price curve that tracks demand apart from a midday solar
discount and scarcity premiums on the ramp shoulders. Deterministic per
seed. Presets cover the two-period games and the flat-fleet peak-day
setup used by the experiment drivers.
"""

from dataclasses import dataclass

import numpy as np

from .actions import FiniteActionLibrary
from .model import AgentSpec, Scenario, ScenarioError, TimeGrid
from .rng import derive_rng

DEFAULT_CHARGE_TOTAL = 5.72e9  # $ allocated through the peak charge
DEFAULT_AGGREGATE_MW = 5000.0  # flat responsive fleet
CAP_REFERENCE_MW = 1000.0  # caps are quoted against a 1000 MW average agent

_STREAM_SYNTH = 901


@dataclass(frozen=True)
class SyntheticProfileParams:
    """Hot-day stand-in profile: a broad afternoon peak block topping out
    near peak_hour, a morning trough, prices tracking demand with a
    midday solar discount and scarcity premiums on the ramp shoulders.
    """

    intervals: int = 96
    peak_mw: float = 85000.0
    trough_mw: float = 55000.0
    peak_hour: float = 17.0
    price_base: float = 60.0  # $/MWh
    price_spike_factor: float = 8.0
    noise_fraction: float = 0.002  # of the peak-trough range

    def __post_init__(self):
        if not self.peak_mw > self.trough_mw > 0:
            raise ScenarioError("need peak_mw > trough_mw > 0")
        if not 0 <= self.peak_hour < 24:
            raise ScenarioError("peak hour outside the day")
        if self.intervals < 8:
            raise ScenarioError("need at least 8 intervals")


def generate_synthetic_day(params, seed=0):
    """Deterministic (baseline MW, prices $/MWh) pair for one day.

    The demand curve is renormalized after noise so its maximum is
    exactly peak_mw and its minimum exactly trough_mw. The peak block
    (a flat-topped afternoon plateau ending near peak_hour) spans about
    four hours; shoulder hours carry scarcity price premiums scaled by
    price_spike_factor.
    """
    n = params.intervals
    hours = (np.arange(n) + 0.5) * 24.0 / n
    center = params.peak_hour - 2.25
    shape = np.exp(-(((hours - center) / 3.1) ** 8))
    shape -= 0.25 * np.exp(-(((hours - 4.5) / 3.0) ** 2))
    if params.noise_fraction > 0:
        rng = derive_rng(seed, _STREAM_SYNTH)
        shape += params.noise_fraction * rng.standard_normal(n)
    shape = (shape - shape.min()) / (shape.max() - shape.min())
    baseline = params.trough_mw + (params.peak_mw - params.trough_mw) * shape

    prices = params.price_base * (0.4 + 0.9 * shape)
    prices -= 0.5 * params.price_base * np.exp(-(((hours - (center - 1.25)) / 2.0) ** 2))
    shoulder = np.exp(-(((hours - (center - 2.35)) / 0.5) ** 2))
    shoulder += np.exp(-(((hours - (center + 2.35)) / 0.5) ** 2))
    prices += 0.5 * params.price_base * params.price_spike_factor * shoulder
    return baseline, prices


def flat_fleet_scenario(
    n_agents=5,
    cap_mw=1500.0,
    intervals=96,
    seed=0,
    charge_total=DEFAULT_CHARGE_TOTAL,
    aggregate_mw=DEFAULT_AGGREGATE_MW,
    profile_params=None,
):
    """Peak-day scenario with an initially flat responsive fleet.

    cap_mw is quoted for a reference 1000 MW agent; per-agent bounds
    scale with the fleet split so aggregate flexibility stays fixed as
    n_agents varies.
    """
    params = profile_params or SyntheticProfileParams(intervals=intervals)
    baseline, prices = generate_synthetic_day(params, seed)
    per_agent = aggregate_mw / n_agents
    upper = cap_mw * per_agent / CAP_REFERENCE_MW
    duration = 24 * 60 // intervals
    agents = tuple(
        AgentSpec(
            id=f"lfl{i + 1:02d}",
            baseline=np.full(intervals, per_agent),
            lower_bound=0.0,
            upper_bound=upper,
        )
        for i in range(n_agents)
    )
    return Scenario(
        grid=TimeGrid(intervals, duration, "peak-day"),
        baseline=baseline,
        prices=prices,
        charge_total=charge_total,
        agents=agents,
    )


def two_period_scenario(background, energy=1.0, charge_total=100.0, split_baseline=False):
    """Two agents allocating a fixed budget over two intervals.

    With split_baseline the reference profile is the even split (the
    natural continuous-game baseline); otherwise everything starts in
    the first interval, matching the all-or-nothing menu below.
    """
    b = np.array([energy / 2, energy / 2]) if split_baseline else np.array([energy, 0.0])
    agents = tuple(
        AgentSpec(id=f"p{i + 1}", baseline=b, lower_bound=0.0, upper_bound=energy)
        for i in range(2)
    )
    return Scenario(
        grid=TimeGrid(2, 60, "two-period"),
        baseline=np.asarray(background, dtype=float),
        prices=np.zeros(2),
        charge_total=charge_total,
        agents=agents,
    )


def all_or_nothing_library(agent):
    """The coarse two-period menu: keep everything at t1 or move it to t2."""
    energy = agent.energy_budget
    return FiniteActionLibrary(
        agent_id=agent.id,
        baseline=agent.baseline,
        deltas=np.array([[0.0, 0.0], [-energy, energy]]),
        labels=("no-action", "flip"),
    )


# Two-period background presets: balanced, highly imbalanced (gap >= the
# combined budgets, the peak is exogenous), mildly imbalanced (the gap
# lies between one budget and the combined budgets, so simultaneous
# avoidance flips the peak back and forth).
CASE_BALANCED = (1.0, 1.0)
CASE_HIGHLY_IMBALANCED = (4.0, 1.0)
CASE_MILDLY_IMBALANCED = (2.5, 1.0)

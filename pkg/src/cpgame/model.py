"""Core domain types: time grid, agents, scenarios, and system profiles.

Units: power in MW per interval, energy in MW*interval (interval duration
factored out), money in $. Interval indices are 0-based in memory and
1-based in every CSV surface.
"""

import math
from dataclasses import dataclass

import numpy as np


class ScenarioError(ValueError):
    """Scenario or agent data violates a structural constraint."""


class InfeasibleActionError(ValueError):
    """A load-shift vector violates balance, bounds, or freezing."""


BALANCE_RTOL = 1e-9
DEFAULT_TIE_TOLERANCE = 1e-6  # MW, absolute


def _as_vector(values, n, what):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ScenarioError(f"{what}: expected {n} values, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class TimeGrid:
    """Discrete decision horizon shared by every series in a scenario."""

    interval_count: int
    interval_duration_minutes: int = 60
    window_label: str = "day"

    def __post_init__(self):
        if self.interval_count < 2:
            raise ScenarioError("grid needs at least 2 intervals")
        if self.interval_duration_minutes <= 0:
            raise ScenarioError("interval duration must be positive")


@dataclass(frozen=True)
class AgentSpec:
    """A responsive load: reference profile, energy budget, and power bounds."""

    id: str
    baseline: np.ndarray
    lower_bound: float
    upper_bound: float
    energy_budget: float = None

    def __post_init__(self):
        baseline = np.asarray(self.baseline, dtype=float)
        baseline.setflags(write=False)
        object.__setattr__(self, "baseline", baseline)
        if self.lower_bound < 0:
            raise ScenarioError(f"agent {self.id}: lower bound must be >= 0")
        if self.lower_bound > self.upper_bound:
            raise ScenarioError(f"agent {self.id}: lower bound exceeds upper bound")
        if np.any(baseline < self.lower_bound - 1e-12) or np.any(
            baseline > self.upper_bound + 1e-12
        ):
            raise ScenarioError(f"agent {self.id}: baseline outside [lower, upper] bounds")
        total = float(baseline.sum())
        if self.energy_budget is None:
            object.__setattr__(self, "energy_budget", total)
        elif abs(total - self.energy_budget) > BALANCE_RTOL * max(1.0, abs(self.energy_budget)):
            raise ScenarioError(
                f"agent {self.id}: baseline sums to {total}, not the stated "
                f"energy budget {self.energy_budget}"
            )

    @property
    def n_intervals(self):
        return self.baseline.shape[0]


@dataclass(frozen=True)
class Scenario:
    """One energy-balance window: non-responsive demand, prices, and agents."""

    grid: TimeGrid
    baseline: np.ndarray  # non-responsive demand, MW per interval
    prices: np.ndarray  # $/MWh per interval
    charge_total: float  # total cost allocated through the peak charge, $
    agents: tuple
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE

    def __post_init__(self):
        n = self.grid.interval_count
        baseline = _as_vector(self.baseline, n, "non-responsive baseline")
        prices = _as_vector(self.prices, n, "prices")
        if np.any(baseline < 0):
            raise ScenarioError("non-responsive baseline must be non-negative")
        if self.charge_total < 0:
            raise ScenarioError("total allocated charge must be non-negative")
        if self.tie_tolerance <= 0:
            raise ScenarioError("tie tolerance must be positive")
        baseline.setflags(write=False)
        prices.setflags(write=False)
        object.__setattr__(self, "baseline", baseline)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "agents", tuple(self.agents))
        for agent in self.agents:
            if agent.n_intervals != n:
                raise ScenarioError(f"agent {agent.id}: baseline length != grid size")

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def has_negative_prices(self):
        """Negative prices are legal (flagged, never rejected)."""
        return bool(np.any(self.prices < 0))

    def initial_profile(self):
        """Pre-game scheduled system load: baseline plus reference demand."""
        stacks = [self.baseline] + [a.baseline for a in self.agents]
        return np.array([math.fsum(col) for col in zip(*stacks)])


@dataclass(frozen=True)
class SystemProfile:
    """Aggregate load with its peak value and tie-tolerant peak interval set."""

    values: np.ndarray
    peak_value: float
    peak_set: np.ndarray  # ascending 0-based interval indices

    @classmethod
    def from_values(cls, values, tie_tolerance=DEFAULT_TIE_TOLERANCE):
        values = np.asarray(values, dtype=float)
        values.setflags(write=False)
        peaks = peak_set(values, tie_tolerance)
        return cls(values=values, peak_value=float(values.max()), peak_set=peaks)

    @property
    def peak_interval(self):
        """Deterministic single representative: lowest index in the peak set."""
        return int(self.peak_set[0])


def peak_set(values, tol):
    """All intervals within `tol` MW of the maximum, in ascending order."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ScenarioError("peak set of an empty profile")
    return np.flatnonzero(values >= values.max() - tol)


def system_load(scenario, actions):
    """Aggregate profile from the baseline and one shift vector per agent.

    Summation is exactly rounded (fsum), so agent order cannot change the
    result bit-for-bit. Infeasible actions are rejected.
    """
    from .actions import validate_action

    if len(actions) != scenario.n_agents:
        raise ScenarioError(
            f"expected {scenario.n_agents} actions, got {len(actions)}"
        )
    columns = [scenario.baseline]
    for agent, action in zip(scenario.agents, actions):
        if not validate_action(agent, action):
            raise InfeasibleActionError(f"agent {agent.id}: infeasible action")
        columns.append(agent.baseline + np.asarray(action, dtype=float))
    values = np.array([math.fsum(col) for col in zip(*columns)])
    return SystemProfile.from_values(values, scenario.tie_tolerance)


def build_scenario(config, base_dir=None):
    """Validated Scenario from a parsed configuration mapping.

    Schema (YAML/JSON): grid {intervals, duration_minutes, label},
    baseline_csv or baseline, prices_csv or prices, cost_C, agents[]
    (id, baseline | baseline_mw | baseline_csv, lower_mw, upper_mw),
    tie_tolerance, seed. The seed key is read by the experiment drivers,
    not here.
    """
    from .files import read_series

    def resolve(entry, csv_key, inline_key, n=None):
        if csv_key in entry:
            return read_series(entry[csv_key], base_dir=base_dir)
        if inline_key in entry:
            value = entry[inline_key]
            if np.isscalar(value):
                return np.full(n, float(value))
            return np.asarray(value, dtype=float)
        raise ScenarioError(f"config needs either {csv_key} or {inline_key}")

    try:
        grid_cfg = config["grid"]
        grid = TimeGrid(
            interval_count=int(grid_cfg["intervals"]),
            interval_duration_minutes=int(grid_cfg.get("duration_minutes", 60)),
            window_label=str(grid_cfg.get("label", "day")),
        )
    except KeyError as exc:
        raise ScenarioError(f"config missing key: {exc}") from exc

    n = grid.interval_count
    baseline = resolve(config, "baseline_csv", "baseline", n)
    prices = resolve(config, "prices_csv", "prices", n)

    agents = []
    for entry in config.get("agents", []):
        if "baseline_csv" in entry:
            agent_baseline = read_series(entry["baseline_csv"], base_dir=base_dir)
        elif "baseline_mw" in entry:
            agent_baseline = np.full(n, float(entry["baseline_mw"]))
        else:
            agent_baseline = np.asarray(entry["baseline"], dtype=float)
        agents.append(
            AgentSpec(
                id=str(entry.get("id", f"agent{len(agents) + 1}")),
                baseline=agent_baseline,
                lower_bound=float(entry.get("lower_mw", 0.0)),
                upper_bound=float(entry["upper_mw"]),
            )
        )

    return Scenario(
        grid=grid,
        baseline=baseline,
        prices=prices,
        charge_total=float(config["cost_C"]),
        agents=tuple(agents),
        tie_tolerance=float(config.get("tie_tolerance", DEFAULT_TIE_TOLERANCE)),
    )

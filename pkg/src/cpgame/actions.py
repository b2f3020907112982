"""Load-shift actions: feasibility checks, greedy refill, finite libraries.

An action is a per-interval MW shift vector summing to zero (energy
balance) that keeps consumption baseline+action inside the agent's power
bounds. Finite libraries are ordered menus of such vectors; entry 0 is
always the no-action vector.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import InfeasibleActionError

BALANCE_TOL_FACTOR = 1e-6  # of the agent's energy budget, absolute
BOUNDS_EPS = 1e-9
PREFIX_TOL = 1e-9  # MW


@dataclass(frozen=True)
class FrozenPrefix:
    """Realized consumption for intervals that can no longer be revised."""

    frozen_through: int  # number of leading intervals already realized
    values: np.ndarray  # realized consumption, MW, length frozen_through

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape[0] != self.frozen_through:
            raise InfeasibleActionError("frozen prefix length mismatch")

    @classmethod
    def empty(cls):
        return cls(frozen_through=0, values=np.empty(0))

    @classmethod
    def of_action(cls, agent, action, frozen_through):
        """Prefix realized by playing `action` up to the given interval."""
        x = agent.baseline + np.asarray(action, dtype=float)
        return cls(frozen_through=frozen_through, values=x[:frozen_through].copy())


@dataclass(frozen=True)
class FiniteActionLibrary:
    """Ordered menu of feasible shift vectors for one agent.

    `source_indices` maps entries back to the library they were filtered
    from, so round histories keep canonical indices across freezing.
    """

    agent_id: str
    baseline: np.ndarray
    deltas: np.ndarray  # (n_actions, n_intervals)
    labels: tuple
    source_indices: np.ndarray = None
    infeasible_count: int = 0
    duplicate_count: int = 0

    def __post_init__(self):
        deltas = np.ascontiguousarray(self.deltas, dtype=float)
        deltas.setflags(write=False)
        object.__setattr__(self, "deltas", deltas)
        if self.source_indices is None:
            object.__setattr__(self, "source_indices", np.arange(len(deltas)))
        if len(self.labels) != len(deltas):
            raise ValueError("one label per library entry required")

    def __len__(self):
        return self.deltas.shape[0]

    @property
    def shutdown_combination_count(self):
        """Entries other than the no-action baseline."""
        return len(self) - 1


def validate_action(agent, action, frozen=None):
    """True iff balance, bounds, and (if given) the frozen prefix hold."""
    action = np.asarray(action, dtype=float)
    if action.shape != agent.baseline.shape:
        return False
    balance_tol = BALANCE_TOL_FACTOR * abs(agent.energy_budget)
    if abs(float(action.sum())) > balance_tol:
        return False
    x = agent.baseline + action
    eps = BOUNDS_EPS * max(1.0, abs(agent.upper_bound), abs(agent.lower_bound))
    if np.any(x < agent.lower_bound - eps) or np.any(x > agent.upper_bound + eps):
        return False
    if frozen is not None and frozen.frozen_through:
        if np.any(np.abs(x[: frozen.frozen_through] - frozen.values) > PREFIX_TOL):
            return False
    return True


def refill_lowest_price(curtailed_energy, prices, headroom, excluded=()):
    """Spread curtailed energy over the cheapest intervals first.

    Strictly ascending price order, ties broken by ascending interval
    index; each interval absorbs at most its headroom. Excluded intervals
    absorb nothing. Raises when the headroom cannot hold everything.
    """
    prices = np.asarray(prices, dtype=float)
    headroom = np.ascontiguousarray(headroom, dtype=float)
    allowed = np.ones(prices.shape[0], dtype=bool)
    excluded = list(excluded)
    if excluded:
        allowed[np.asarray(excluded, dtype=int)] = False
    order = np.flatnonzero(allowed)[np.argsort(prices[allowed], kind="stable")]
    alloc, leftover = kernels.greedy_fill(
        float(curtailed_energy), order.astype(np.int64), headroom
    )
    if leftover > 1e-9 * max(1.0, abs(float(curtailed_energy))):
        raise InfeasibleActionError(
            f"refill of {curtailed_energy} MW*intervals exceeds available headroom"
        )
    return alloc


def random_action(agent, rng, frozen=None):
    """Seeded feasible shift vector; prefix-consistent when frozen is given.

    Draws random weights, hands the spare energy (above the mandatory
    per-interval minimum) to intervals in weight order, and converts the
    resulting consumption back to a shift vector.
    """
    n = agent.baseline.shape[0]
    h = frozen.frozen_through if frozen is not None else 0
    x = np.empty(n)
    if h:
        x[:h] = frozen.values
    residual = agent.energy_budget - float(x[:h].sum()) - agent.lower_bound * (n - h)
    if residual < 0:
        raise InfeasibleActionError("frozen prefix leaves an infeasible residual budget")
    weights = rng.random(n - h)
    order = (np.argsort(-weights, kind="stable") + h).astype(np.int64)
    headroom = np.zeros(n)
    headroom[h:] = agent.upper_bound - agent.lower_bound
    alloc, leftover = kernels.greedy_fill(residual, order, headroom)
    if leftover > 1e-9 * max(1.0, agent.energy_budget):
        raise InfeasibleActionError("bounds cannot absorb the agent's energy budget")
    x[h:] = agent.lower_bound + alloc[h:]
    return x - agent.baseline


def _assemble(agent, rows, labels):
    """Filter candidate rows through the validator, dropping failures."""
    deltas = [np.zeros(agent.baseline.shape[0])]
    kept_labels = ["no-action"]
    infeasible = 0
    duplicates = 0
    seen = {deltas[0].tobytes()}
    for row, label in zip(rows, labels):
        if row is None or not validate_action(agent, row):
            infeasible += 1
            continue
        key = row.tobytes()
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        deltas.append(row)
        kept_labels.append(label)
    return FiniteActionLibrary(
        agent_id=agent.id,
        baseline=agent.baseline,
        deltas=np.array(deltas),
        labels=tuple(kept_labels),
        infeasible_count=infeasible,
        duplicate_count=duplicates,
    )


def coarse_library(agent, prices, max_shutdown_hours=3):
    """On/off menu: full shutdown of every 1..max_shutdown_hours interval set.

    Curtailed energy is refilled cheapest-first over the remaining
    intervals within upper-bound headroom. Infeasible combinations are
    dropped and counted, never raised.
    """
    n = agent.baseline.shape[0]
    headroom = agent.upper_bound - agent.baseline
    rows = []
    labels = []
    for k in range(1, max_shutdown_hours + 1):
        for subset in itertools.combinations(range(n), k):
            subset = list(subset)
            delta = np.zeros(n)
            delta[subset] = -agent.baseline[subset]
            try:
                delta += refill_lowest_price(
                    float(agent.baseline[subset].sum()), prices, headroom, excluded=subset
                )
            except InfeasibleActionError:
                rows.append(None)
                labels.append("")
                continue
            rows.append(delta)
            labels.append("shutdown " + "+".join(str(t + 1) for t in subset))
    return _assemble(agent, rows, labels)


def fine_library(agent, reference_profile, prices):
    """Menu over the four highest-demand intervals of the reference profile.

    Per selected interval the agent keeps, halves, or sheds its baseline;
    curtailed energy refills cheapest-first outside the selected set.
    3^4 = 81 entries including no-action when every combination is
    feasible.
    """
    reference_profile = np.asarray(reference_profile, dtype=float)
    n = agent.baseline.shape[0]
    if n < 4:
        raise ValueError("fine library needs at least 4 intervals")
    by_demand = np.argsort(-reference_profile, kind="stable")
    selected = np.sort(by_demand[:4])
    headroom = agent.upper_bound - agent.baseline
    names = {0.0: "none", 0.5: "half", 1.0: "full"}
    rows = []
    labels = []
    for fractions in itertools.product((0.0, 0.5, 1.0), repeat=4):
        if all(f == 0.0 for f in fractions):
            continue  # no-action supplied by the assembler
        delta = np.zeros(n)
        delta[selected] = -np.asarray(fractions) * agent.baseline[selected]
        try:
            delta += refill_lowest_price(
                -float(delta.sum()), prices, headroom, excluded=selected
            )
        except InfeasibleActionError:
            rows.append(None)
            labels.append("")
            continue
        rows.append(delta)
        labels.append(
            "shift "
            + ",".join(f"{names[f]}@{t + 1}" for f, t in zip(fractions, selected))
        )
    return _assemble(agent, rows, labels)


def restrict_library(library, frozen):
    """Entries whose realized prefix matches the frozen consumption."""
    if frozen is None or frozen.frozen_through == 0:
        return library
    h = frozen.frozen_through
    x_prefix = library.baseline[:h][None, :] + library.deltas[:, :h]
    keep = np.all(np.abs(x_prefix - frozen.values[None, :]) <= PREFIX_TOL, axis=1)
    if not keep.any():
        raise InfeasibleActionError(
            f"no library entry continues the frozen prefix for {library.agent_id}"
        )
    idx = np.flatnonzero(keep)
    return FiniteActionLibrary(
        agent_id=library.agent_id,
        baseline=library.baseline,
        deltas=library.deltas[idx],
        labels=tuple(library.labels[i] for i in idx),
        source_indices=library.source_indices[idx],
        infeasible_count=library.infeasible_count,
        duplicate_count=library.duplicate_count,
    )

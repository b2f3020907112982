"""Peak-charge allocation: exact tie-aware rule, linearization, fixed-price cap.

The exact rule charges each consumer in proportion to its consumption
summed over the peak interval set. Charges are budget-balanced: summed
over every payer (including the aggregated non-responsive block) they
recover the full allocated cost.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChargeBreakdown:
    peak_charge: float
    energy_cost: float

    @property
    def total(self):
        return self.peak_charge + self.energy_cost


@dataclass(frozen=True)
class LinearizedCharge:
    """First-order model of the peak charge around a reference point.

    predicted charge = slope * x_peak + intercept, exact at the reference.
    """

    slope: float  # $/MW
    intercept: float  # $
    reference_own: float  # expansion point of own peak consumption, MW
    reference_responsive_total: float  # all responsive demand at the peak, MW
    reference_total_demand: float  # responsive + non-responsive at the peak, MW

    def predict(self, x_peak):
        return self.slope * x_peak + self.intercept


def cp_charge(profile, consumption, charge_total):
    """Exact allocated charge for one consumption vector.

    charge = C * sum(consumption over peak set) / sum(system load over
    peak set). With a single peak interval this is the plain share
    consumption/peak. A zero-load peak set is degenerate and rejected.
    """
    consumption = np.asarray(consumption, dtype=float)
    if consumption.shape != profile.values.shape:
        raise ValueError("consumption vector length differs from system profile")
    if np.any(consumption < 0):
        raise ValueError("consumption must be non-negative")
    peak_load = float(profile.values[profile.peak_set].sum())
    if peak_load <= 0:
        raise ValueError("degenerate allocation: zero total load over the peak set")
    return charge_total * float(consumption[profile.peak_set].sum()) / peak_load


def total_cost(agent, action, profile, scenario):
    """Peak charge plus energy payments for one agent's submitted action.

    `profile` must already include this agent's action; energy is settled
    per interval at the scenario prices.
    """
    consumption = agent.baseline + np.asarray(action, dtype=float)
    peak = cp_charge(profile, consumption, scenario.charge_total)
    energy = float(consumption @ scenario.prices)
    return ChargeBreakdown(peak_charge=peak, energy_cost=energy)


def linearize_charge(reference_peaks, baseline_peak, charge_total, agent_index,
                     opponent_peaks=None):
    """Taylor linearization of one agent's peak charge.

    reference_peaks holds every responsive consumer's peak-interval
    consumption at the expansion point. The intercept is evaluated with
    opponents at `opponent_peaks` (defaults to the reference), since the
    model is linear in those too.
    """
    reference_peaks = np.asarray(reference_peaks, dtype=float)
    responsive_total = float(reference_peaks.sum())
    total_demand = baseline_peak + responsive_total
    if total_demand <= 0:
        raise ValueError("linearization needs positive total demand at the peak")
    own = float(reference_peaks[agent_index])
    if opponent_peaks is None:
        opponent_peaks = reference_peaks
    opponent_peaks = np.asarray(opponent_peaks, dtype=float)
    others = float(opponent_peaks.sum() - opponent_peaks[agent_index])
    scale = charge_total / total_demand**2
    return LinearizedCharge(
        slope=scale * (total_demand - own),
        intercept=scale * (-own * others + own * responsive_total),
        reference_own=own,
        reference_responsive_total=responsive_total,
        reference_total_demand=total_demand,
    )


def fixed_price_charge(x_peak, baseline_peak, charge_total):
    """Fixed-price approximation: peak consumption times C / B(peak).

    Valid when responsive demand is small next to the non-responsive
    baseline; the ratio acts as an effective capacity price per MW.
    """
    if baseline_peak <= 0:
        raise ValueError("fixed-price approximation needs positive baseline peak")
    return x_peak * charge_total / baseline_peak

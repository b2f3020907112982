"""Peak-reduction metrics and sweep summaries."""

from dataclasses import dataclass

import numpy as np


def peak_reduction(initial_values, final_values):
    """Percent drop of the profile maximum; negative means amplification."""
    initial_values = np.asarray(initial_values, dtype=float)
    final_values = np.asarray(final_values, dtype=float)
    if initial_values.shape != final_values.shape:
        raise ValueError("profiles must cover the same horizon")
    initial_peak = float(initial_values.max())
    if initial_peak <= 0:
        raise ValueError("initial peak must be positive")
    return 100.0 * (initial_peak - float(final_values.max())) / initial_peak


@dataclass(frozen=True)
class SweepRow:
    dynamics: str
    cap_mw: float
    n_agents: int
    final_peak_mw: float
    reduction_pct: float

    @property
    def label(self):
        return f"{self.dynamics.upper()}, cap={self.cap_mw:g}, N={self.n_agents}"


@dataclass(frozen=True)
class SweepSummary:
    rows: tuple
    average_pct: float
    best: SweepRow
    worst: SweepRow

    def by_dynamics(self, dynamics):
        return [r for r in self.rows if r.dynamics == dynamics]

    def average_for(self, dynamics):
        rows = self.by_dynamics(dynamics)
        return float(np.mean([r.reduction_pct for r in rows])) if rows else float("nan")


def summarize_sweep(results):
    """Tabulate reductions keyed by (dynamics, cap, n_agents).

    Values are Trajectory objects (round 0 is the pre-game schedule) or
    (initial_peak, final_peak) pairs. Rows come out sorted by key.
    """
    if not results:
        raise ValueError("empty sweep")
    rows = []
    for dynamics, cap, n in sorted(results):
        value = results[(dynamics, cap, n)]
        if hasattr(value, "rounds"):
            initial_peak = value.rounds[0].profile.peak_value
            final_peak = value.rounds[-1].profile.peak_value
        else:
            initial_peak, final_peak = map(float, value)
        rows.append(
            SweepRow(
                dynamics=dynamics,
                cap_mw=float(cap),
                n_agents=int(n),
                final_peak_mw=final_peak,
                reduction_pct=100.0 * (initial_peak - final_peak) / initial_peak,
            )
        )
    reductions = [r.reduction_pct for r in rows]
    return SweepSummary(
        rows=tuple(rows),
        average_pct=float(np.mean(reductions)),
        best=rows[int(np.argmax(reductions))],
        worst=rows[int(np.argmin(reductions))],
    )

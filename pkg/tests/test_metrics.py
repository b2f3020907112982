import numpy as np
import pytest

from cpgame import peak_reduction, summarize_sweep


class TestPeakReduction:
    def test_five_percent(self):
        assert peak_reduction(np.array([100.0, 50.0]), np.array([95.0, 60.0])) == pytest.approx(5.0)

    def test_unchanged(self):
        values = np.array([80.0, 100.0, 90.0])
        assert peak_reduction(values, values) == 0.0

    def test_amplification_is_negative(self):
        assert peak_reduction(
            np.array([100.0, 90.0]), np.array([101.08, 90.0])
        ) == pytest.approx(-1.08)

    def test_zero_initial_peak_rejected(self):
        with pytest.raises(ValueError):
            peak_reduction(np.zeros(3), np.zeros(3))

    def test_invariant_to_low_appended_intervals(self):
        initial = np.array([100.0, 80.0])
        final = np.array([96.0, 85.0])
        base = peak_reduction(initial, final)
        grown = peak_reduction(np.append(initial, 50.0), np.append(final, 40.0))
        assert base == grown


class TestSummarizeSweep:
    def test_single_row(self):
        summary = summarize_sweep({("brd", 1200.0, 5): (100.0, 95.0)})
        assert summary.average_pct == pytest.approx(5.0)
        assert summary.best == summary.worst == summary.rows[0]

    def test_two_row_average(self):
        summary = summarize_sweep(
            {
                ("brd", 1200.0, 5): (100.0, 96.0),
                ("fpd", 1200.0, 5): (100.0, 94.0),
            }
        )
        assert summary.average_pct == pytest.approx(5.0)
        assert summary.best.dynamics == "fpd"
        assert summary.worst.dynamics == "brd"

    def test_full_grid_row_count(self):
        results = {
            (dyn, cap, n): (100.0, 100.0 - 0.01 * n)
            for dyn in ("brd", "fpd")
            for cap in (1200.0, 1500.0, 1800.0)
            for n in range(2, 16)
        }
        summary = summarize_sweep(results)
        assert len(summary.rows) == 84

    def test_aggregates_recomputable(self):
        rng = np.random.default_rng(4)
        results = {
            ("brd", cap, n): (100.0, float(100.0 - rng.uniform(-2, 6)))
            for cap in (1200.0, 1500.0)
            for n in (2, 3, 4)
        }
        summary = summarize_sweep(results)
        values = [r.reduction_pct for r in summary.rows]
        assert summary.average_pct == pytest.approx(np.mean(values))
        assert summary.best.reduction_pct == max(values)
        assert summary.worst.reduction_pct == min(values)
        assert summary.best.reduction_pct >= summary.average_pct >= summary.worst.reduction_pct

    def test_deterministic_ordering(self):
        results = {
            ("fpd", 1500.0, 3): (100.0, 95.0),
            ("brd", 1200.0, 7): (100.0, 97.0),
            ("brd", 1200.0, 2): (100.0, 98.0),
        }
        summary = summarize_sweep(results)
        keys = [(r.dynamics, r.cap_mw, r.n_agents) for r in summary.rows]
        assert keys == sorted(keys)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize_sweep({})

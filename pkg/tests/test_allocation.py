import numpy as np
import pytest

from cpgame import (
    AgentSpec,
    SystemProfile,
    cp_charge,
    fixed_price_charge,
    linearize_charge,
    system_load,
    total_cost,
)
from cpgame.rng import derive_rng

from conftest import flat_agent, make_scenario


def profile_of(values, tol=1e-6):
    return SystemProfile.from_values(np.asarray(values, dtype=float), tol)


class TestCpCharge:
    def test_single_peak(self):
        assert cp_charge(profile_of([15.0, 25.0]), np.array([5.0, 5.0]), 100.0) == pytest.approx(
            100.0 * 5 / 25
        )

    def test_tie_rule(self):
        charge = cp_charge(profile_of([12.0, 12.0, 10.0]), np.array([1.0, 2.0, 3.0]), 100.0)
        assert charge == pytest.approx(100.0 * (1 + 2) / (12 + 12))

    def test_zero_peak_load_rejected(self):
        with pytest.raises(ValueError):
            cp_charge(profile_of([0.0, 0.0]), np.array([0.0, 0.0]), 100.0)

    def test_negative_consumption_rejected(self):
        with pytest.raises(ValueError):
            cp_charge(profile_of([1.0, 2.0]), np.array([-1.0, 2.0]), 10.0)

    def test_budget_balance_random_instances(self):
        rng = derive_rng(11, 0)
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            n_agents = int(rng.integers(1, 6))
            baseline = rng.uniform(0.0, 40.0, n)
            charge_total = float(rng.uniform(1.0, 1e4))
            consumptions = [rng.uniform(0.0, 10.0, n) for _ in range(n_agents)]
            values = baseline + np.sum(consumptions, axis=0)
            profile = profile_of(values)
            shares = [cp_charge(profile, x, charge_total) for x in consumptions]
            shares.append(cp_charge(profile, baseline, charge_total))
            assert abs(sum(shares) - charge_total) <= 1e-9 * charge_total

    def test_monotone_in_peak_consumption(self):
        profile = profile_of([10.0, 30.0, 20.0])
        x = np.array([2.0, 4.0, 1.0])
        base = cp_charge(profile, x, 50.0)
        x_up = x.copy()
        x_up[1] += 0.5
        assert cp_charge(profile, x_up, 50.0) > base


class TestTotalCost:
    def test_zero_prices(self, toy_scenario, toy_agent):
        profile = system_load(toy_scenario, [np.zeros(2)])
        breakdown = total_cost(toy_agent, np.zeros(2), profile, toy_scenario)
        assert breakdown.energy_cost == 0.0
        assert breakdown.total == breakdown.peak_charge

    def test_pure_energy(self):
        agent = AgentSpec(id="a", baseline=np.array([3.0, 4.0]), lower_bound=0.0, upper_bound=10.0)
        scenario = make_scenario([0.0, 0.0], [1.0, 2.0], 0.0, [agent])
        profile = system_load(scenario, [np.zeros(2)])
        breakdown = total_cost(agent, np.zeros(2), profile, scenario)
        assert breakdown.total == pytest.approx(3.0 * 1 + 4.0 * 2)

    def test_equal_agents_pay_equal_shares(self):
        rng = derive_rng(11, 1)
        baseline = 50000.0 + 5000.0 * rng.random(24)
        agents = [flat_agent(f"a{i}", 1000.0, 24, upper=1500.0) for i in range(5)]
        scenario = make_scenario(baseline, np.zeros(24), 5.72e9, agents)
        profile = system_load(scenario, [np.zeros(24)] * 5)
        t_star = profile.peak_interval
        charges = [
            total_cost(a, np.zeros(24), profile, scenario).peak_charge for a in agents
        ]
        expected = 5.72e9 * 1000.0 / profile.values[t_star]
        assert np.allclose(charges, expected, rtol=1e-12)


class TestLinearization:
    def test_slope_formula(self):
        lin = linearize_charge(np.array([10.0, 10.0]), 80.0, 100.0, agent_index=0)
        assert lin.slope == pytest.approx(100.0 / 100.0**2 * (100.0 - 10.0))
        assert lin.reference_total_demand == pytest.approx(100.0)

    def test_exact_at_expansion_point(self):
        lin = linearize_charge(np.array([10.0, 10.0]), 80.0, 100.0, agent_index=0)
        assert lin.intercept == pytest.approx(1.0)
        assert lin.predict(10.0) == pytest.approx(10.0)  # = 100 * 10 / 100 exactly

    def test_zero_reference(self):
        lin = linearize_charge(np.array([0.0, 5.0]), 95.0, 100.0, agent_index=0)
        assert lin.slope == pytest.approx(100.0 / 100.0)
        assert lin.intercept == 0.0

    def test_exact_match_random_references(self):
        rng = derive_rng(11, 2)
        for _ in range(100):
            n_agents = int(rng.integers(1, 6))
            refs = rng.uniform(0.0, 20.0, n_agents)
            b_peak = float(rng.uniform(10.0, 200.0))
            charge_total = float(rng.uniform(1.0, 1e3))
            i = int(rng.integers(0, n_agents))
            lin = linearize_charge(refs, b_peak, charge_total, agent_index=i)
            exact = charge_total * refs[i] / (b_peak + refs.sum())
            assert lin.predict(refs[i]) == pytest.approx(exact, rel=1e-9)

    def test_quadratic_error_decay(self):
        rng = derive_rng(11, 3)
        improvements = []
        for _ in range(100):
            n_agents = int(rng.integers(2, 6))
            refs = rng.uniform(1.0, 20.0, n_agents)
            b_peak = float(rng.uniform(50.0, 500.0))
            charge_total = float(rng.uniform(1.0, 1e3))
            direction = rng.uniform(-1.0, 1.0, n_agents)
            delta = 0.02 * (b_peak + refs.sum())

            def rel_error(scale):
                x = refs + scale * direction
                lin = linearize_charge(refs, b_peak, charge_total, 0, opponent_peaks=x)
                exact = charge_total * x[0] / (b_peak + x.sum())
                return abs(lin.predict(x[0]) - exact) / abs(exact)

            err_full, err_half = rel_error(delta), rel_error(delta / 2)
            if err_full > 1e-13:
                improvements.append(err_full / max(err_half, 1e-300))
        assert np.median(improvements) >= 3.0

    def test_degenerate_demand_rejected(self):
        with pytest.raises(ValueError):
            linearize_charge(np.array([0.0]), 0.0, 10.0, agent_index=0)


class TestFixedPrice:
    def test_direct(self):
        assert fixed_price_charge(5.0, 100.0, 100.0) == pytest.approx(5.0)

    def test_zero_consumption(self):
        assert fixed_price_charge(0.0, 100.0, 100.0) == 0.0

    def test_system_scale_price(self):
        # effective capacity price around $67k per MW at peak-day scale
        price = fixed_price_charge(1.0, 85000.0, 5.72e9)
        assert 6e4 < price < 7e4

    def test_nonpositive_baseline_rejected(self):
        with pytest.raises(ValueError):
            fixed_price_charge(1.0, 0.0, 10.0)

    def test_limit_of_exact_charge(self):
        x = np.array([7.0, 3.0])
        previous_gap = None
        for b_peak in (1e3, 1e5, 1e7):
            profile = profile_of([b_peak + 10.0, 5.0])
            exact = cp_charge(profile, x, 1000.0)
            approx = fixed_price_charge(7.0, b_peak, 1000.0)
            gap = abs(exact - approx) / approx
            if previous_gap is not None:
                assert gap < previous_gap
            previous_gap = gap
        assert previous_gap < 1e-4

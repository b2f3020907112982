import numpy as np
import pytest

from cpgame import AgentSpec, Scenario, TimeGrid


@pytest.fixture
def toy_agent():
    return AgentSpec(id="a1", baseline=np.array([5.0, 5.0]), lower_bound=0.0, upper_bound=10.0)


@pytest.fixture
def toy_scenario(toy_agent):
    return Scenario(
        grid=TimeGrid(2),
        baseline=np.array([10.0, 20.0]),
        prices=np.zeros(2),
        charge_total=100.0,
        agents=(toy_agent,),
    )


def make_scenario(baseline, prices, charge_total, agents, tie_tolerance=1e-6):
    baseline = np.asarray(baseline, dtype=float)
    return Scenario(
        grid=TimeGrid(len(baseline)),
        baseline=baseline,
        prices=np.asarray(prices, dtype=float),
        charge_total=charge_total,
        agents=tuple(agents),
        tie_tolerance=tie_tolerance,
    )


def flat_agent(name, level, n, upper, lower=0.0):
    return AgentSpec(id=name, baseline=np.full(n, float(level)), lower_bound=lower, upper_bound=upper)

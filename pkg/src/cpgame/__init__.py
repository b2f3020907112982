"""Deterministic simulator of coincident-peak pricing games.

Flexible loads shift demand under energy-balance and capacity
constraints while a peak charge allocates a fixed system cost in
proportion to consumption at the system peak. The package provides the
allocation rule, finite and continuous best responses, best-response and
fictitious-play dynamics over rolling schedules, information-provider
experiments, and a CLI for the bundled scenario presets.
"""

__version__ = "0.1.0"

from .actions import (
    FiniteActionLibrary,
    FrozenPrefix,
    coarse_library,
    fine_library,
    random_action,
    refill_lowest_price,
    restrict_library,
    validate_action,
)
from .allocation import (
    ChargeBreakdown,
    LinearizedCharge,
    cp_charge,
    fixed_price_charge,
    linearize_charge,
    total_cost,
)
from .bestresponse import (
    BeliefProfile,
    OpponentBelief,
    SolverParams,
    best_response_continuous,
    best_response_finite,
    brute_force_oracle,
    evaluate_cost,
    expected_best_response_finite,
    opponent_aggregate,
)
from .dynamics import (
    ConvergenceResult,
    RoundState,
    Schedule,
    Trajectory,
    detect_convergence,
    make_day_ahead_schedule,
    make_repeated_schedule,
    make_rolling_schedule,
    run_brd,
    run_fpd,
)
from .infoprovider import (
    IPRanking,
    IPopulationResult,
    PopulationMix,
    ip_initial_actions,
    naive_ranking,
    responder_action,
    response_aware_ranking,
    run_ip_population,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import SweepRow, SweepSummary, peak_reduction, summarize_sweep
from .model import (
    AgentSpec,
    InfeasibleActionError,
    Scenario,
    ScenarioError,
    SystemProfile,
    TimeGrid,
    build_scenario,
    peak_set,
    system_load,
)
from .rng import derive_rng
from .synth import (
    SyntheticProfileParams,
    all_or_nothing_library,
    flat_fleet_scenario,
    generate_synthetic_day,
    two_period_scenario,
)

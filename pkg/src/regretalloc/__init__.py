"""Minimax-regret sample allocation for stratified randomized experiments.

Given a participant budget, population shares, and per-arm outcome
variances, this package computes the sample allocations that are worst-case
optimal under three decision paradigms (per-group decisions with weighted
utility, one pooled decision, and the worst-off-group objective), evaluates
worst-case and scenario-specific expected regret in closed form, and
cross-validates everything with a seeded Monte Carlo trial simulator.
"""

from .allocate import (
    ContinuousAllocation,
    DegenerateAllocationWarning,
    allocate,
    continuous_egalitarian,
    continuous_minimax,
    continuous_neyman,
    continuous_proportional,
    egalitarian_allocation,
    minimax_allocation,
    neyman_allocation,
    proportional_allocation,
    round_to_even_floor,
)
from .casestudy import (
    CaseStudyCase,
    ConfigError,
    IncidenceSpec,
    PowerSpec,
    ScenarioConfig,
    build_case_study,
    composite_moments,
    conservative_noise,
    default_config,
    load_config,
    parse_config,
    required_sample_size,
)
from .model import (
    Allocation,
    DesignProblem,
    GroupSpec,
    Paradigm,
    TruthScenario,
    ValidationError,
    check_allocation,
    check_scenario,
    validate_problem,
)
from .regret import (
    RegretSummary,
    adversarial_tau_separate,
    expected_regret,
    joint_adversarial_tau,
    joint_mismatch,
    joint_regret_expression,
    worst_case,
    worst_case_egalitarian,
    worst_case_joint,
    worst_case_separate,
)
from .simulate import (
    MonteCarloEstimate,
    SimConfig,
    TrialData,
    decide,
    dm_group_estimates,
    dm_pooled_estimate,
    monte_carlo_regret,
    realized_regret,
    run_trial,
)
from .stats import (
    ThresholdConstants,
    bisect_root,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    normal_sf,
    solve_threshold_constants,
    threshold_constants,
)

__version__ = "0.1.0"

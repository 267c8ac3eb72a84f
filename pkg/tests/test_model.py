"""Domain types and validation."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from regretalloc.model import (
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


def two_group_problem(weights=(0.5, 0.5), variances=((1.0, 1.0), (1.0, 1.0)), budget=100):
    groups = tuple(
        GroupSpec(label=f"g{i}", weight=w, var_control=v[0], var_treated=v[1])
        for i, (w, v) in enumerate(zip(weights, variances))
    )
    return DesignProblem(budget=budget, groups=groups)


class TestValidateProblem:
    def test_symmetric_instance_is_valid(self):
        problem = two_group_problem()
        assert validate_problem(problem) == problem

    def test_case_study_instance_is_valid(self, covid_cases):
        problem = covid_cases[0].problem
        assert problem.weights == (0.83, 0.17)
        assert problem.budget == 9320
        assert validate_problem(problem) == problem

    def test_weight_sum_violation(self):
        problem = two_group_problem(weights=(0.6, 0.6))
        with pytest.raises(ValidationError, match="sum to 1"):
            validate_problem(problem)

    def test_nonpositive_variance_names_group(self):
        problem = two_group_problem(variances=((1.0, 1.0), (0.0, 1.0)))
        with pytest.raises(ValidationError, match="group 1"):
            validate_problem(problem)

    def test_nonpositive_weight_names_group(self):
        problem = two_group_problem(weights=(1.0, 0.0))
        with pytest.raises(ValidationError, match="group 1"):
            validate_problem(problem)

    def test_budget_below_one_pair_per_group(self):
        problem = two_group_problem(budget=3)
        with pytest.raises(ValidationError, match="budget"):
            validate_problem(problem)

    def test_empty_group_list(self):
        with pytest.raises(ValidationError):
            validate_problem(DesignProblem(budget=10, groups=()))

    def test_validation_is_idempotent(self):
        problem = two_group_problem()
        once = validate_problem(problem)
        twice = validate_problem(once)
        assert once == twice == problem


class TestCheckAllocation:
    def test_accepts_even_within_budget(self):
        problem = two_group_problem()
        allocation = Allocation(counts=(60, 40))
        assert check_allocation(problem, allocation) == allocation

    def test_rejects_odd_count(self):
        with pytest.raises(ValidationError, match="odd"):
            check_allocation(two_group_problem(), Allocation(counts=(59, 40)))

    def test_rejects_negative_count(self):
        with pytest.raises(ValidationError, match="negative"):
            check_allocation(two_group_problem(), Allocation(counts=(-2, 40)))

    def test_rejects_over_budget(self):
        with pytest.raises(ValidationError, match="exceeds budget"):
            check_allocation(two_group_problem(), Allocation(counts=(60, 42)))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValidationError, match="entries"):
            check_allocation(two_group_problem(), Allocation(counts=(60,)))

    def test_zero_counts_are_structurally_fine(self):
        # Degenerate but well-formed; regret evaluation handles the infinity.
        check_allocation(two_group_problem(), Allocation(counts=(0, 0)))

    def test_non_integral_counts_rejected_at_construction(self):
        with pytest.raises(ValidationError, match="integers"):
            Allocation(counts=(59.5, 40.0))
        assert Allocation(counts=(60.0, 40)).counts == (60, 40)

    @given(st.integers(min_value=0, max_value=50), st.integers(min_value=0, max_value=50))
    def test_even_pairs_always_pass(self, a, b):
        check_allocation(two_group_problem(budget=200), Allocation(counts=(2 * a, 2 * b)))


class TestScenario:
    def test_check_scenario_accepts_matching(self):
        problem = two_group_problem()
        truth = TruthScenario(
            tau=(0.1, -0.2), baseline=(0.0, 0.0),
            var_control=(1.0, 1.0), var_treated=(1.0, 1.0),
        )
        assert check_scenario(problem, truth) == truth

    def test_check_scenario_rejects_length_mismatch(self):
        problem = two_group_problem()
        truth = TruthScenario(tau=(0.1,), baseline=(0.0,), var_control=(1.0,), var_treated=(1.0,))
        with pytest.raises(ValidationError, match="tau"):
            check_scenario(problem, truth)

    def test_check_scenario_rejects_zero_variance(self):
        problem = two_group_problem()
        truth = TruthScenario(
            tau=(0.1, 0.2), baseline=(0.0, 0.0),
            var_control=(1.0, 0.0), var_treated=(1.0, 1.0),
        )
        with pytest.raises(ValidationError, match="group 1"):
            check_scenario(problem, truth)

    def test_negated_flips_only_tau(self):
        truth = TruthScenario(
            tau=(0.1, -0.2), baseline=(0.3, 0.4),
            var_control=(1.0, 2.0), var_treated=(3.0, 4.0),
        )
        flipped = truth.negated()
        assert flipped.tau == (-0.1, 0.2)
        assert flipped.baseline == truth.baseline
        assert flipped.var_sums == truth.var_sums


def test_paradigm_is_exhaustive():
    assert {p.value for p in Paradigm} == {
        "separate-utilitarian",
        "joint-utilitarian",
        "separate-egalitarian",
    }


def test_group_spec_var_sum():
    spec = GroupSpec(label="g", weight=1.0, var_control=1.5, var_treated=2.5)
    assert spec.var_sum == 4.0

"""Domain types shared across the package: stratified design problems,
per-group sample allocations, and concrete data-generating scenarios.

Conventions
-----------
* Group weights are population shares and must sum to 1; inputs are expected
  to arrive already normalized (validation rejects anything else).
* Outcomes are unit-agnostic: only relative magnitudes of effects and
  standard deviations matter, and regret scales linearly with the outcome
  unit.  The bundled case study stores rates as fractions, never percents.
* Allocations hold even per-group counts so treatment and control can be
  perfectly balanced within each stratum.

All types are immutable values; they carry no behavior beyond validation and
may be shared freely across threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

WEIGHT_SUM_TOL = 1e-9


class ValidationError(ValueError):
    """An input violates a documented structural invariant."""


@dataclass(frozen=True)
class GroupSpec:
    """One stratum: population share and per-arm outcome variances."""

    label: str
    weight: float
    var_control: float
    var_treated: float

    @property
    def var_sum(self) -> float:
        """Variance of the treated-minus-control contrast per unit pair."""
        return self.var_control + self.var_treated


@dataclass(frozen=True)
class DesignProblem:
    """A total participant budget plus the ordered list of strata."""

    budget: int
    groups: tuple[GroupSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", tuple(self.groups))

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(g.weight for g in self.groups)

    @property
    def var_sums(self) -> tuple[float, ...]:
        return tuple(g.var_sum for g in self.groups)


@dataclass(frozen=True)
class Allocation:
    """Even per-group sample counts; the sum may undershoot the budget."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        coerced = []
        for c in self.counts:
            n = int(c)
            if n != c:
                # Catches continuous shares passed where counts belong.
                raise ValidationError(f"allocation counts must be integers, got {c!r}")
            coerced.append(n)
        object.__setattr__(self, "counts", tuple(coerced))

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class TruthScenario:
    """A concrete data-generating process: per-group treatment effects,
    nuisance baselines, and per-arm variances."""

    tau: tuple[float, ...]
    baseline: tuple[float, ...]
    var_control: tuple[float, ...]
    var_treated: tuple[float, ...]

    def __post_init__(self) -> None:
        for name in ("tau", "baseline", "var_control", "var_treated"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @property
    def var_sums(self) -> tuple[float, ...]:
        return tuple(c + t for c, t in zip(self.var_control, self.var_treated))

    def negated(self) -> "TruthScenario":
        """The sign-flipped scenario; expected regret is invariant to this."""
        return TruthScenario(
            tau=tuple(-t for t in self.tau),
            baseline=self.baseline,
            var_control=self.var_control,
            var_treated=self.var_treated,
        )


class Paradigm(enum.Enum):
    """How decisions are made and how group utilities are aggregated."""

    SEPARATE_UTILITARIAN = "separate-utilitarian"
    JOINT_UTILITARIAN = "joint-utilitarian"
    SEPARATE_EGALITARIAN = "separate-egalitarian"


def validate_problem(problem: DesignProblem) -> DesignProblem:
    """Check all structural invariants and return the problem unchanged.

    Raises ValidationError naming the offending group index for per-group
    violations.  Validation is idempotent.
    """
    groups = problem.groups
    if len(groups) < 1:
        raise ValidationError("a design problem needs at least one group")
    for g, spec in enumerate(groups):
        if not (spec.weight > 0.0) or not math.isfinite(spec.weight):
            raise ValidationError(f"group {g}: weight must be positive, got {spec.weight}")
        if not (spec.var_control > 0.0) or not math.isfinite(spec.var_control):
            raise ValidationError(
                f"group {g}: control-arm variance must be positive, got {spec.var_control}"
            )
        if not (spec.var_treated > 0.0) or not math.isfinite(spec.var_treated):
            raise ValidationError(
                f"group {g}: treated-arm variance must be positive, got {spec.var_treated}"
            )
    total_weight = sum(g.weight for g in groups)
    if abs(total_weight - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationError(
            f"group weights must sum to 1 within {WEIGHT_SUM_TOL:g}; got {total_weight!r}"
        )
    if problem.budget < 2 * len(groups):
        raise ValidationError(
            f"budget {problem.budget} cannot give each of {len(groups)} groups "
            "one treated/control pair"
        )
    return problem


def check_allocation(problem: DesignProblem, allocation: Allocation) -> Allocation:
    """Standalone allocation checker: even nonnegative counts, correct length,
    total within budget.  Usable independently of any allocator."""
    counts = allocation.counts
    if len(counts) != problem.n_groups:
        raise ValidationError(
            f"allocation has {len(counts)} entries for {problem.n_groups} groups"
        )
    for g, n in enumerate(counts):
        if n < 0:
            raise ValidationError(f"group {g}: count {n} is negative")
        if n % 2 != 0:
            raise ValidationError(f"group {g}: count {n} is odd; strata must balance 1:1")
    if sum(counts) > problem.budget:
        raise ValidationError(
            f"allocation total {sum(counts)} exceeds budget {problem.budget}"
        )
    return allocation


def check_scenario(problem: DesignProblem, truth: TruthScenario) -> TruthScenario:
    """Check a truth scenario against a problem: matching group count and
    positive variances."""
    G = problem.n_groups
    for name, values in (
        ("tau", truth.tau),
        ("baseline", truth.baseline),
        ("var_control", truth.var_control),
        ("var_treated", truth.var_treated),
    ):
        if len(values) != G:
            raise ValidationError(f"scenario field {name} has {len(values)} entries for {G} groups")
    for g in range(G):
        if truth.var_control[g] <= 0.0 or truth.var_treated[g] <= 0.0:
            raise ValidationError(f"group {g}: scenario variances must be positive")
    return truth

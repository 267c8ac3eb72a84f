"""Sample-selection rules for stratified 1:1 randomized designs.

Four allocation schemes are provided, each optimal (or classical) for a
different objective:

* ``minimax_allocation``      -- shares proportional to (s0^2+s1^2)^(1/3) * w^(2/3);
  minimizes the worst-case expected regret when every group gets its own
  treat/no-treat decision under population-weighted utility.
* ``proportional_allocation`` -- shares proportional to the population weight w;
  minimax when a single pooled decision covers all groups.
* ``egalitarian_allocation``  -- shares proportional to s0^2+s1^2; minimizes the
  worst-off group's worst-case regret.
* ``neyman_allocation``       -- shares proportional to w * sqrt(s0^2+s1^2); the
  classical variance-minimizing reference rule, included for comparisons.

Every scheme first computes a continuous share vector that exhausts the
budget, then rounds each share down to an even integer (``2*floor(x/2)``).
Rounding can strand up to ``2*(G-1)`` participants; by default they stay
unassigned, matching the closed-form selection rules literally.  Passing
``redistribute=True`` hands the leftover pairs back out, greedily by
marginal worst-case-regret reduction for the regret-driven schemes and by
largest remainder for proportional/Neyman.

All functions are pure; inputs are validated via ``model.validate_problem``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .model import Allocation, DesignProblem, ValidationError, validate_problem

# Snap tolerance: continuous shares within this of an even integer are taken
# as exactly even, so float noise cannot drop a pair (e.g. 0.2*200 -> 40).
_EVEN_SNAP = 1e-9


class DegenerateAllocationWarning(UserWarning):
    """Some group's rounded count is zero; its worst-case regret is infinite."""


@dataclass(frozen=True)
class ContinuousAllocation:
    """Relaxed shares: positive reals summing exactly to the budget."""

    shares: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "shares", tuple(float(s) for s in self.shares))

    @property
    def total(self) -> float:
        return sum(self.shares)


def _normalized_shares(problem: DesignProblem, raw_weights: list[float]) -> ContinuousAllocation:
    total = sum(raw_weights)
    return ContinuousAllocation(
        shares=tuple(problem.budget * w / total for w in raw_weights)
    )


def continuous_minimax(problem: DesignProblem) -> ContinuousAllocation:
    """Budget-exhausting relaxation of the minimax rule:
    share_g = (s0_g^2+s1_g^2)^(1/3) * w_g^(2/3) * N / normalizer."""
    validate_problem(problem)
    raw = [g.var_sum ** (1.0 / 3.0) * g.weight ** (2.0 / 3.0) for g in problem.groups]
    return _normalized_shares(problem, raw)


def continuous_proportional(problem: DesignProblem) -> ContinuousAllocation:
    """share_g = w_g * N."""
    validate_problem(problem)
    return _normalized_shares(problem, [g.weight for g in problem.groups])


def continuous_egalitarian(problem: DesignProblem) -> ContinuousAllocation:
    """share_g proportional to the contrast variance s0_g^2 + s1_g^2; makes
    sqrt(2*(s0^2+s1^2)/n) identical across groups."""
    validate_problem(problem)
    return _normalized_shares(problem, [g.var_sum for g in problem.groups])


def continuous_neyman(problem: DesignProblem) -> ContinuousAllocation:
    """share_g proportional to w_g * sqrt(s0_g^2 + s1_g^2)."""
    validate_problem(problem)
    return _normalized_shares(problem, [g.weight * math.sqrt(g.var_sum) for g in problem.groups])


def _floor_even(x: float) -> int:
    nearest = 2 * round(x / 2.0)
    if abs(x - nearest) <= _EVEN_SNAP * max(1.0, abs(x)):
        return int(nearest)
    return 2 * math.floor(x / 2.0)


def round_to_even_floor(shares: ContinuousAllocation) -> Allocation:
    """Round every share down to an even integer: n_g = 2*floor(share_g/2).

    Guarantees share_g - 2 < n_g <= share_g (up to the even-snap tolerance),
    so no group loses more than one treated/control pair to rounding.
    """
    return Allocation(counts=tuple(_floor_even(s) for s in shares.shares))


def _warn_on_zero_counts(allocation: Allocation, scheme: str) -> Allocation:
    zero_groups = [g for g, n in enumerate(allocation.counts) if n == 0]
    if zero_groups:
        warnings.warn(
            f"{scheme} allocation assigns zero samples to group(s) {zero_groups}; "
            "worst-case regret is infinite for unsampled groups",
            DegenerateAllocationWarning,
            stacklevel=3,
        )
    return allocation


def _greedy_redistribute(problem: DesignProblem, counts: list[int], objective) -> list[int]:
    """Assign leftover pairs one at a time to the group whose extra pair
    lowers ``objective(counts)`` the most."""
    leftover = problem.budget - sum(counts)
    while leftover >= 2:
        current = objective(counts)
        best_g, best_val = None, current
        for g in range(len(counts)):
            counts[g] += 2
            val = objective(counts)
            counts[g] -= 2
            if val < best_val:
                best_g, best_val = g, val
        if best_g is None:
            # Flat objective (e.g. several unsampled groups keep it infinite):
            # fill empty groups first, then fall back to the largest group.
            empty = [g for g, n in enumerate(counts) if n == 0]
            candidates = empty if empty else range(len(counts))
            best_g = max(candidates, key=lambda g: problem.groups[g].weight)
        counts[best_g] += 2
        leftover -= 2
    return counts


def _largest_remainder_redistribute(
    problem: DesignProblem, counts: list[int], shares: ContinuousAllocation
) -> list[int]:
    leftover = problem.budget - sum(counts)
    order = sorted(
        range(len(counts)),
        key=lambda g: shares.shares[g] - counts[g],
        reverse=True,
    )
    i = 0
    while leftover >= 2:
        counts[order[i % len(order)]] += 2
        leftover -= 2
        i += 1
    return counts


def _separate_worst_case(problem: DesignProblem, counts: list[int]) -> float:
    from .stats import threshold_constants

    c0 = threshold_constants().c0
    total = 0.0
    for g, spec in enumerate(problem.groups):
        if counts[g] == 0:
            return math.inf
        total += spec.weight * math.sqrt(2.0 * spec.var_sum / counts[g])
    return c0 * total


def _egalitarian_worst_case(problem: DesignProblem, counts: list[int]) -> float:
    from .stats import threshold_constants

    c0 = threshold_constants().c0
    worst = 0.0
    for g, spec in enumerate(problem.groups):
        if counts[g] == 0:
            return math.inf
        worst = max(worst, math.sqrt(2.0 * spec.var_sum / counts[g]))
    return c0 * worst


def minimax_allocation(problem: DesignProblem, redistribute: bool = False) -> Allocation:
    """Even-floored minimax selection; optionally redistributes leftover pairs
    by greatest reduction of the separate-decision worst-case regret."""
    shares = continuous_minimax(problem)
    counts = list(round_to_even_floor(shares).counts)
    if redistribute:
        counts = _greedy_redistribute(
            problem, counts, lambda c: _separate_worst_case(problem, c)
        )
    return _warn_on_zero_counts(Allocation(counts=tuple(counts)), "minimax")


def proportional_allocation(problem: DesignProblem, redistribute: bool = False) -> Allocation:
    """n_g = w_g * N when that is an even integer, otherwise its even floor;
    redistribution follows the largest fractional remainder."""
    shares = continuous_proportional(problem)
    counts = list(round_to_even_floor(shares).counts)
    if redistribute:
        counts = _largest_remainder_redistribute(problem, counts, shares)
    return _warn_on_zero_counts(Allocation(counts=tuple(counts)), "proportional")


def egalitarian_allocation(problem: DesignProblem, redistribute: bool = False) -> Allocation:
    """Even-floored variance-proportional selection; optional redistribution
    targets the worst-off group's regret."""
    shares = continuous_egalitarian(problem)
    counts = list(round_to_even_floor(shares).counts)
    if redistribute:
        counts = _greedy_redistribute(
            problem, counts, lambda c: _egalitarian_worst_case(problem, c)
        )
    return _warn_on_zero_counts(Allocation(counts=tuple(counts)), "egalitarian")


def neyman_allocation(problem: DesignProblem, redistribute: bool = False) -> Allocation:
    """Even-floored classical Neyman reference allocation."""
    shares = continuous_neyman(problem)
    counts = list(round_to_even_floor(shares).counts)
    if redistribute:
        counts = _largest_remainder_redistribute(problem, counts, shares)
    return _warn_on_zero_counts(Allocation(counts=tuple(counts)), "neyman")


SCHEMES = {
    "minimax": minimax_allocation,
    "proportional": proportional_allocation,
    "egalitarian": egalitarian_allocation,
    "neyman": neyman_allocation,
}


def allocate(problem: DesignProblem, scheme: str, redistribute: bool = False) -> Allocation:
    """Dispatch by scheme name; raises ValidationError for unknown names."""
    try:
        fn = SCHEMES[scheme]
    except KeyError:
        raise ValidationError(
            f"unknown allocation scheme {scheme!r}; expected one of {sorted(SCHEMES)}"
        ) from None
    return fn(problem, redistribute=redistribute)

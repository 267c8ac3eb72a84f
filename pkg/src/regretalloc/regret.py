"""Closed-form regret evaluation for stratified treat/no-treat decisions.

Worst-case regret (adversarial treatment effects, noise levels fixed by the
design problem):

* separate decisions, weighted utility:
      H(n)  = c0 * sum_g w_g * sqrt(2*(s0_g^2+s1_g^2)/n_g)
* one pooled decision, weighted utility: finite only when the realized
  sampling fractions n_g/total match the population weights, in which case
      Hj(n) = F * c0 * sqrt(2 * sum_g h_g*(s0_g^2+s1_g^2) / total),
  with h_g = n_g/total and F = (sum 1/w)^-1 * (sum 1/h); any mismatch lets
  the adversary run the regret to infinity.
* separate decisions, worst-off group:
      He(n) = c0 * max_g sqrt(2*(s0_g^2+s1_g^2)/n_g)

Expected regret under a concrete scenario uses the exact error probability
of the sign decision rule: a group decided from a mean-difference estimate
with standard error ``se`` is wrong with probability Phi_c(|tau|/se).

Zero-count convention: a group with no samples has an infinitely noisy
estimate, so its decision is a fair coin and its expected regret
contribution is |tau|/2.  (Worst-case regret over unbounded adversaries is
infinite for such groups; expected regret under a fixed scenario is not.)

Infinities are explicit ``math.inf`` states, never overflow artifacts, and
are absorbing in comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    Allocation,
    DesignProblem,
    Paradigm,
    TruthScenario,
    ValidationError,
    check_allocation,
    check_scenario,
    validate_problem,
)
from .stats import normal_cdf, normal_pdf, normal_sf, threshold_constants

# A pooled decision is treated as weight-matched when the proportionality
# mismatch statistic K is below this fraction of sum_g w_g/h_g.  Even-floor
# rounding of an exactly proportional selection perturbs K by O(1/total),
# around 1e-5 for the bundled case study; genuinely non-proportional
# selections sit orders of magnitude above this threshold.
KAPPA_TOL_DEFAULT = 1e-4


@dataclass(frozen=True)
class RegretSummary:
    """A regret value, its paradigm, and optional per-group contributions.

    For separate-utilitarian summaries the value is the sum of the per-group
    entries; for separate-egalitarian it is their maximum.
    """

    paradigm: Paradigm
    value: float
    per_group: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if math.isnan(self.value) or self.value < 0.0:
            raise ValidationError(f"regret must be a nonnegative real or inf, got {self.value}")
        if self.per_group is not None:
            object.__setattr__(self, "per_group", tuple(float(v) for v in self.per_group))

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def _standard_error(var_sum: float, count: int) -> float:
    """sqrt(2*(s0^2+s1^2)/n) with an explicit infinite limit at n = 0."""
    if count == 0:
        return math.inf
    return math.sqrt(2.0 * var_sum / count)


def _wrong_sign_probability(tau: float, se: float) -> float:
    """P(sign decision disagrees with sign(tau)); 1/2 at infinite noise."""
    if math.isinf(se):
        return 0.5
    return normal_sf(abs(tau) / se)


def worst_case_separate(problem: DesignProblem, allocation: Allocation) -> RegretSummary:
    """H(n): worst-case regret with per-group decisions, weighted utility.
    Infinite as soon as any group is unsampled."""
    validate_problem(problem)
    check_allocation(problem, allocation)
    c0 = threshold_constants().c0
    per_group = tuple(
        spec.weight * c0 * _standard_error(spec.var_sum, n)
        for spec, n in zip(problem.groups, allocation.counts)
    )
    return RegretSummary(Paradigm.SEPARATE_UTILITARIAN, sum(per_group), per_group)


def worst_case_egalitarian(problem: DesignProblem, allocation: Allocation) -> RegretSummary:
    """He(n): worst-case regret of the worst-off group (unweighted)."""
    validate_problem(problem)
    check_allocation(problem, allocation)
    c0 = threshold_constants().c0
    per_group = tuple(
        c0 * _standard_error(spec.var_sum, n)
        for spec, n in zip(problem.groups, allocation.counts)
    )
    return RegretSummary(Paradigm.SEPARATE_EGALITARIAN, max(per_group), per_group)


def sampling_fractions(allocation: Allocation) -> tuple[float, ...]:
    """h_g = n_g / total sampled; requires a nonempty allocation."""
    total = allocation.total
    if total <= 0:
        raise ValidationError("pooled quantities need at least one sampled participant")
    return tuple(n / total for n in allocation.counts)


def joint_mismatch(problem: DesignProblem, allocation: Allocation) -> float:
    """K = sum_g w_g/h_g - G * (sum_g 1/w_g)^-1 * (sum_g 1/h_g).

    Zero exactly when the sampling fractions are weight-proportional; the
    pooled-decision worst case is finite only on that set.  Infinite when a
    group is unsampled.
    """
    validate_problem(problem)
    check_allocation(problem, allocation)
    if any(n == 0 for n in allocation.counts):
        return math.inf
    h = sampling_fractions(allocation)
    w = problem.weights
    G = problem.n_groups
    inv_w = sum(1.0 / x for x in w)
    inv_h = sum(1.0 / x for x in h)
    return sum(wg / hg for wg, hg in zip(w, h)) - G * inv_h / inv_w


def worst_case_joint(
    problem: DesignProblem,
    allocation: Allocation,
    kappa_tol: float = KAPPA_TOL_DEFAULT,
) -> RegretSummary:
    """Hj(n): worst-case regret of the pooled sign decision.

    Returns infinity when any group is unsampled or when the mismatch
    statistic K exceeds ``kappa_tol`` relative to sum_g w_g/h_g; otherwise
    evaluates F * c0 * sqrt(2 * sum_g h_g*(s0_g^2+s1_g^2) / total).
    """
    validate_problem(problem)
    check_allocation(problem, allocation)
    if allocation.total <= 0:
        raise ValidationError("pooled worst case needs at least one sampled participant")
    if any(n == 0 for n in allocation.counts):
        return RegretSummary(Paradigm.JOINT_UTILITARIAN, math.inf)
    h = sampling_fractions(allocation)
    w = problem.weights
    kappa = joint_mismatch(problem, allocation)
    scale = sum(wg / hg for wg, hg in zip(w, h))
    if abs(kappa) > kappa_tol * scale:
        return RegretSummary(Paradigm.JOINT_UTILITARIAN, math.inf)
    factor = sum(1.0 / x for x in h) / sum(1.0 / x for x in w)
    pooled_var = sum(hg * s for hg, s in zip(h, problem.var_sums))
    c0 = threshold_constants().c0
    value = factor * c0 * math.sqrt(2.0 * pooled_var / allocation.total)
    return RegretSummary(Paradigm.JOINT_UTILITARIAN, value)


def expected_regret(
    problem: DesignProblem,
    allocation: Allocation,
    truth: TruthScenario,
    paradigm: Paradigm,
) -> RegretSummary:
    """Expected regret of the sign decision rule under a concrete scenario.

    Standard errors come from the scenario's own variances (the truth may be
    noisier or quieter than the design assumptions).  Groups with tau = 0
    contribute zero under every paradigm; unsampled groups follow the
    fair-coin convention.
    """
    validate_problem(problem)
    check_allocation(problem, allocation)
    check_scenario(problem, truth)

    if paradigm is Paradigm.JOINT_UTILITARIAN:
        aggregate = sum(
            spec.weight * t for spec, t in zip(problem.groups, truth.tau)
        )
        if aggregate == 0.0:
            return RegretSummary(paradigm, 0.0)
        if allocation.total == 0:
            # Nothing sampled anywhere: the pooled decision is a fair coin.
            return RegretSummary(paradigm, abs(aggregate) / 2.0)
        h = sampling_fractions(allocation)
        tau_bar = sum(hg * t for hg, t in zip(h, truth.tau))
        se = math.sqrt(
            2.0 * sum(hg * s for hg, s in zip(h, truth.var_sums)) / allocation.total
        )
        stat = tau_bar / se
        # Wrong decision: fail to treat when the aggregate effect is positive,
        # or treat when it is negative.
        if aggregate > 0.0:
            value = aggregate * normal_sf(stat)
        else:
            value = -aggregate * normal_cdf(stat)
        return RegretSummary(paradigm, value)

    per_group_unweighted = tuple(
        abs(t) * _wrong_sign_probability(t, _standard_error(s, n))
        for t, s, n in zip(truth.tau, truth.var_sums, allocation.counts)
    )
    if paradigm is Paradigm.SEPARATE_UTILITARIAN:
        per_group = tuple(
            spec.weight * r for spec, r in zip(problem.groups, per_group_unweighted)
        )
        return RegretSummary(paradigm, sum(per_group), per_group)
    if paradigm is Paradigm.SEPARATE_EGALITARIAN:
        return RegretSummary(paradigm, max(per_group_unweighted), per_group_unweighted)
    raise ValidationError(f"unknown paradigm {paradigm!r}")


def adversarial_tau_separate(problem: DesignProblem, allocation: Allocation) -> TruthScenario:
    """The least-favorable effect profile for per-group sign decisions:
    tau_g = t_star * sqrt(2*(s0_g^2+s1_g^2)/n_g).

    Requires every group sampled.  Plugging the result into
    ``expected_regret`` under the separate-utilitarian paradigm recovers
    ``worst_case_separate`` exactly.  Signs are immaterial by symmetry; the
    positive profile is returned.
    """
    validate_problem(problem)
    check_allocation(problem, allocation)
    if any(n == 0 for n in allocation.counts):
        raise ValidationError("adversarial effects are undefined for unsampled groups")
    t_star = threshold_constants().t_star
    tau = tuple(
        t_star * _standard_error(s, n)
        for s, n in zip(problem.var_sums, allocation.counts)
    )
    return TruthScenario(
        tau=tau,
        baseline=(0.0,) * problem.n_groups,
        var_control=tuple(g.var_control for g in problem.groups),
        var_treated=tuple(g.var_treated for g in problem.groups),
    )


def joint_adversarial_tau(
    problem: DesignProblem, allocation: Allocation, t_dagger: float
) -> TruthScenario:
    """The stationary effect profile of the pooled-decision adversary at a
    given value ``t_dagger`` of the standardized pooled mean.

    tau_g = sqrt(2*sum_g' h_g'^2 * S_g') / (h_g * sqrt(total))
            * { Phi_c(t)/phi(t) + (t/w_g - G*Phi_c(t)/(w_g*phi(t))) / sum_g' 1/w_g' }

    The profile satisfies the stationarity system: the implied per-group
    multipliers share a single Lagrange value, and the standardized
    multipliers sum to ``t_dagger``.  (The statistic actually induced by the
    profile is a rescaled t_dagger because the per-group standardization
    uses sum h^2*S while the pooled statistic uses sum h*S.)
    """
    validate_problem(problem)
    check_allocation(problem, allocation)
    if not math.isfinite(t_dagger):
        raise ValidationError(f"t_dagger must be finite, got {t_dagger}")
    if any(n == 0 for n in allocation.counts):
        raise ValidationError("adversarial effects are undefined for unsampled groups")
    h = sampling_fractions(allocation)
    w = problem.weights
    total = allocation.total
    G = problem.n_groups
    sf = normal_sf(t_dagger)
    dens = normal_pdf(t_dagger)
    if dens == 0.0:
        raise ValidationError(
            f"t_dagger={t_dagger} is so extreme the normal density underflows; "
            "the stationary profile is unbounded there"
        )
    inv_w = sum(1.0 / x for x in w)
    scale = math.sqrt(2.0 * sum(hg * hg * s for hg, s in zip(h, problem.var_sums)))
    tau = tuple(
        scale
        / (hg * math.sqrt(total))
        * (sf / dens + (t_dagger / wg - G * sf / (wg * dens)) / inv_w)
        for hg, wg in zip(h, w)
    )
    return TruthScenario(
        tau=tau,
        baseline=(0.0,) * G,
        var_control=tuple(g.var_control for g in problem.groups),
        var_treated=tuple(g.var_treated for g in problem.groups),
    )


def joint_regret_expression(
    problem: DesignProblem, allocation: Allocation, t_dagger: float
) -> float:
    """Expected pooled-decision regret along the stationary adversarial path,
    as a function of ``t_dagger``:

    sqrt(2*sum h*S / total) * { K * Phi_c(t)^2/phi(t) + F * t*Phi_c(t) }

    with K the proportionality mismatch and F = (sum 1/w)^-1 (sum 1/h).
    For K = 0 the supremum over t is the finite pooled worst case; for
    K > 0 the expression diverges as t -> -infinity.
    """
    validate_problem(problem)
    check_allocation(problem, allocation)
    if not math.isfinite(t_dagger):
        raise ValidationError(f"t_dagger must be finite, got {t_dagger}")
    if any(n == 0 for n in allocation.counts):
        raise ValidationError("expression undefined for unsampled groups")
    h = sampling_fractions(allocation)
    w = problem.weights
    total = allocation.total
    kappa = joint_mismatch(problem, allocation)
    factor = sum(1.0 / x for x in h) / sum(1.0 / x for x in w)
    sf = normal_sf(t_dagger)
    dens = normal_pdf(t_dagger)
    scale = math.sqrt(2.0 * sum(hg * s for hg, s in zip(h, problem.var_sums)) / total)
    if kappa == 0.0:
        mismatch_term = 0.0
    elif dens == 0.0:
        # Density underflow deep in the tail: the mismatch term has already
        # blown past float range; report the limit explicitly.
        mismatch_term = math.copysign(math.inf, kappa)
    else:
        mismatch_term = kappa * sf * sf / dens
    return scale * (mismatch_term + factor * t_dagger * sf)


def worst_case(
    problem: DesignProblem,
    allocation: Allocation,
    paradigm: Paradigm,
    kappa_tol: float = KAPPA_TOL_DEFAULT,
) -> RegretSummary:
    """Dispatch the worst-case evaluation by paradigm."""
    if paradigm is Paradigm.SEPARATE_UTILITARIAN:
        return worst_case_separate(problem, allocation)
    if paradigm is Paradigm.JOINT_UTILITARIAN:
        return worst_case_joint(problem, allocation, kappa_tol=kappa_tol)
    if paradigm is Paradigm.SEPARATE_EGALITARIAN:
        return worst_case_egalitarian(problem, allocation)
    raise ValidationError(f"unknown paradigm {paradigm!r}")

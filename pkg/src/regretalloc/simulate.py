"""Seeded Monte Carlo engine for stratified 1:1 trials.

Generates Gaussian trial data (control arm N(b - tau/2, s0^2), treated arm
N(b + tau/2, s1^2)), applies the mean-difference estimators and sign
decision rules, and averages realized regret to cross-validate the closed
forms in :mod:`regretalloc.regret`.

Reproducibility contract
------------------------
Replications are processed in fixed chunks of ``CHUNK_SIZE``.  Chunk ``c``
draws from a counter-based Philox generator keyed by
``(master_seed, c)``, and per-chunk partial sums are reduced in chunk-index
order.  Estimates are therefore bit-identical for a given
``(inputs, master_seed)`` regardless of execution order or the number of
worker threads.  Within a chunk, outcome draws are group-major (all
replications of group 0, then group 1, ...), followed by one fair-coin
block per unsampled group.

The egalitarian paradigm targets the worst-off group's *expected* regret,
so its Monte Carlo estimate is the maximum of the per-group replication
means (with the attaining group's standard error), not the mean of the
per-replication maxima.

Standard errors describe only the replications actually observed.  In
scenarios that mix frequent small regrets with rare large ones (tiny
wrong-decision probability but a huge effect behind it), the estimate is
biased low until the replication count comfortably exceeds the inverse of
the rare event's probability; pick ``replications`` accordingly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

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

CHUNK_SIZE = 8192
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """Replication count and master seed for a Monte Carlo run."""

    replications: int
    master_seed: int

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValidationError(
                f"replications must be at least 1, got {self.replications}"
            )


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample mean of realized regret with its standard error."""

    mean: float
    std_error: float
    replications: int


@dataclass(frozen=True)
class TrialData:
    """Observed outcomes and 0/1 assignments, one array pair per group."""

    outcomes: tuple[np.ndarray, ...]
    assignments: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        for g, (y, w) in enumerate(zip(self.outcomes, self.assignments)):
            if y.shape != w.shape:
                raise ValidationError(f"group {g}: outcomes and assignments differ in length")
            n = len(w)
            if n % 2 != 0 or int(w.sum()) * 2 != n:
                raise ValidationError(f"group {g}: treatment is not 1:1 balanced")

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return tuple(len(y) for y in self.outcomes)


def _philox_rng(master_seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=[master_seed & _SEED_MASK, stream & _SEED_MASK])
    )


def run_trial(
    truth: TruthScenario,
    allocation: Allocation,
    seed: int,
    shuffle: bool = False,
) -> TrialData:
    """Draw one trial: n_g/2 control and n_g/2 treated outcomes per group.

    Identical seeds give bit-identical data.  By default the first n_g/2
    units of each group are the treated ones; outcomes are i.i.d. within
    arms so the ordering is distributionally irrelevant, but ``shuffle=True``
    interleaves assignments for realism.
    """
    if len(truth.tau) != len(allocation.counts):
        raise ValidationError("scenario and allocation have different group counts")
    for g, n in enumerate(allocation.counts):
        if n < 0 or n % 2 != 0:
            raise ValidationError(f"group {g}: count {n} cannot be balanced 1:1")
    rng = _philox_rng(seed, 0)
    outcomes: list[np.ndarray] = []
    assignments: list[np.ndarray] = []
    for g, n in enumerate(allocation.counts):
        half = n // 2
        treated = rng.normal(
            truth.baseline[g] + truth.tau[g] / 2.0,
            math.sqrt(truth.var_treated[g]),
            size=half,
        )
        control = rng.normal(
            truth.baseline[g] - truth.tau[g] / 2.0,
            math.sqrt(truth.var_control[g]),
            size=half,
        )
        y = np.concatenate([treated, control])
        w = np.concatenate([np.ones(half, dtype=np.int64), np.zeros(half, dtype=np.int64)])
        if shuffle and n > 0:
            perm = rng.permutation(n)
            y, w = y[perm], w[perm]
        outcomes.append(y)
        assignments.append(w)
    return TrialData(outcomes=tuple(outcomes), assignments=tuple(assignments))


def dm_group_estimates(data: TrialData) -> tuple[float, ...]:
    """Per-group mean-difference estimates; NaN flags an unsampled group."""
    estimates = []
    for y, w in zip(data.outcomes, data.assignments):
        n = len(y)
        if n == 0:
            estimates.append(math.nan)
            continue
        treated_sum = float(y[w == 1].sum())
        control_sum = float(y[w == 0].sum())
        estimates.append(2.0 / n * (treated_sum - control_sum))
    return tuple(estimates)


def dm_pooled_estimate(data: TrialData) -> float:
    """Pooled mean difference over all sampled units:
    (2/total) * (sum of treated outcomes - sum of control outcomes).

    Equals the n-weighted average of the per-group estimates.
    """
    total = sum(data.group_sizes)
    if total == 0:
        raise ValidationError("pooled estimate needs at least one sampled participant")
    diff = 0.0
    for y, w in zip(data.outcomes, data.assignments):
        if len(y) == 0:
            continue
        diff += float(y[w == 1].sum()) - float(y[w == 0].sum())
    return 2.0 / total * diff


def decide(
    paradigm: Paradigm,
    group_estimates: tuple[float, ...] | None = None,
    pooled_estimate: float | None = None,
    rng: np.random.Generator | None = None,
):
    """Sign decision rule: treat iff the relevant estimate is >= 0.

    Separate paradigms threshold each group's estimate; the joint paradigm
    thresholds the pooled estimate.  A group flagged absent (NaN estimate)
    is decided by a fair coin when ``rng`` is supplied (matching the
    infinitely-noisy-estimate convention of the closed forms) and defaults
    to treat otherwise.
    """
    if paradigm is Paradigm.JOINT_UTILITARIAN:
        if pooled_estimate is None:
            raise ValidationError("joint decisions need the pooled estimate")
        return int(pooled_estimate >= 0.0)
    if group_estimates is None:
        raise ValidationError("separate decisions need the per-group estimates")
    decisions = []
    for est in group_estimates:
        if math.isnan(est):
            decisions.append(int(rng.integers(0, 2)) if rng is not None else 1)
        else:
            decisions.append(int(est >= 0.0))
    return tuple(decisions)


def realized_regret(
    truth: TruthScenario,
    problem: DesignProblem,
    decisions,
    paradigm: Paradigm,
) -> float:
    """Regret of one concrete decision vector against the oracle decision.

    Weighted utility: sum_g w_g * tau_g * (best_g - chosen_g); pooled:
    (sum_g w_g tau_g) * (best - chosen); egalitarian: the worst group's
    tau_g * (best_g - chosen_g).  Always nonnegative.
    """
    if paradigm is Paradigm.JOINT_UTILITARIAN:
        aggregate = sum(spec.weight * t for spec, t in zip(problem.groups, truth.tau))
        best = int(aggregate > 0.0)
        return aggregate * (best - int(decisions))
    per_group = [
        t * (int(t > 0.0) - d) for t, d in zip(truth.tau, decisions)
    ]
    if paradigm is Paradigm.SEPARATE_UTILITARIAN:
        return sum(spec.weight * r for spec, r in zip(problem.groups, per_group))
    if paradigm is Paradigm.SEPARATE_EGALITARIAN:
        return max(per_group)
    raise ValidationError(f"unknown paradigm {paradigm!r}")


def _chunk_estimates(
    truth: TruthScenario,
    allocation: Allocation,
    rng: np.random.Generator,
    size: int,
    level: str,
) -> np.ndarray:
    """(size, G) matrix of per-replication group estimates; NaN where n=0.

    ``level='trial'`` draws every outcome and forms the mean differences;
    ``level='estimator'`` draws the estimates from their exact sampling
    distribution N(tau_g, 2*(s0^2+s1^2)/n_g).  The two levels are
    distributionally identical.
    """
    G = len(allocation.counts)
    estimates = np.full((size, G), np.nan)
    for g, n in enumerate(allocation.counts):
        if n == 0:
            continue
        if level == "trial":
            half = n // 2
            treated = rng.normal(
                truth.baseline[g] + truth.tau[g] / 2.0,
                math.sqrt(truth.var_treated[g]),
                size=(size, half),
            )
            control = rng.normal(
                truth.baseline[g] - truth.tau[g] / 2.0,
                math.sqrt(truth.var_control[g]),
                size=(size, half),
            )
            estimates[:, g] = treated.mean(axis=1) - control.mean(axis=1)
        elif level == "estimator":
            se = math.sqrt(2.0 * truth.var_sums[g] / n)
            estimates[:, g] = rng.normal(truth.tau[g], se, size=size)
        else:
            raise ValidationError(f"unknown simulation level {level!r}")
    return estimates


def _chunk_stats(
    problem: DesignProblem,
    allocation: Allocation,
    truth: TruthScenario,
    paradigm: Paradigm,
    master_seed: int,
    chunk_index: int,
    size: int,
    level: str,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-chunk (sum, sum-of-squares) of realized regret.

    Shape (1,) for the scalar paradigms, (G,) per-group for egalitarian.
    """
    rng = _philox_rng(master_seed, chunk_index)
    estimates = _chunk_estimates(truth, allocation, rng, size, level)
    counts = np.asarray(allocation.counts, dtype=float)
    tau = np.asarray(truth.tau)

    if paradigm is Paradigm.JOINT_UTILITARIAN:
        total = counts.sum()
        if total == 0:
            chosen = rng.integers(0, 2, size=size)
        else:
            fractions = counts / total
            sampled = counts > 0
            pooled = estimates[:, sampled] @ fractions[sampled]
            chosen = (pooled >= 0.0).astype(np.int64)
        weights = np.array([g.weight for g in problem.groups])
        aggregate = float(weights @ tau)
        best = int(aggregate > 0.0)
        regrets = aggregate * (best - chosen)
        assert regrets.min() >= 0.0, "realized regret went negative"
        return (
            np.array([regrets.sum()]),
            np.array([(regrets * regrets).sum()]),
        )

    # Separate paradigms: per-group decisions, fair coin for absent groups.
    chosen = np.empty_like(estimates, dtype=np.int64)
    for g, n in enumerate(allocation.counts):
        if n == 0:
            chosen[:, g] = rng.integers(0, 2, size=size)
        else:
            chosen[:, g] = estimates[:, g] >= 0.0
    best = (tau > 0.0).astype(np.int64)
    per_group = tau[None, :] * (best[None, :] - chosen)
    assert per_group.min() >= 0.0, "realized regret went negative"
    if paradigm is Paradigm.SEPARATE_UTILITARIAN:
        weights = np.array([g.weight for g in problem.groups])
        regrets = per_group @ weights
        return (
            np.array([regrets.sum()]),
            np.array([(regrets * regrets).sum()]),
        )
    if paradigm is Paradigm.SEPARATE_EGALITARIAN:
        return per_group.sum(axis=0), (per_group * per_group).sum(axis=0)
    raise ValidationError(f"unknown paradigm {paradigm!r}")


def _mean_and_se(total: float, total_sq: float, reps: int) -> tuple[float, float]:
    mean = total / reps
    if reps < 2:
        return mean, 0.0
    var = max((total_sq - reps * mean * mean) / (reps - 1), 0.0)
    return mean, math.sqrt(var / reps)


def monte_carlo_regret(
    problem: DesignProblem,
    allocation: Allocation,
    truth: TruthScenario,
    paradigm: Paradigm,
    config: SimConfig,
    level: str = "trial",
    workers: int | None = None,
) -> MonteCarloEstimate:
    """Estimate expected regret by averaging over seeded replications.

    ``level`` selects between full trial-data simulation and the exact
    estimator-level shortcut; ``workers`` runs chunks on a thread pool.
    Results are bit-identical across worker counts and levels' own reruns.
    """
    validate_problem(problem)
    check_allocation(problem, allocation)
    check_scenario(problem, truth)
    reps = config.replications
    n_chunks = (reps + CHUNK_SIZE - 1) // CHUNK_SIZE
    sizes = [
        min(CHUNK_SIZE, reps - c * CHUNK_SIZE) for c in range(n_chunks)
    ]

    def job(c: int) -> tuple[np.ndarray, np.ndarray]:
        return _chunk_stats(
            problem, allocation, truth, paradigm,
            config.master_seed, c, sizes[c], level,
        )

    if workers is not None and workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(job, range(n_chunks)))
    else:
        partials = [job(c) for c in range(n_chunks)]

    # Fixed-order reduction over chunk index keeps aggregation deterministic
    # no matter which worker finished first.
    sums = np.sum([p[0] for p in partials], axis=0)
    sums_sq = np.sum([p[1] for p in partials], axis=0)

    if paradigm is Paradigm.SEPARATE_EGALITARIAN:
        means = sums / reps
        worst = int(np.argmax(means))
        mean, se = _mean_and_se(float(sums[worst]), float(sums_sq[worst]), reps)
    else:
        mean, se = _mean_and_se(float(sums[0]), float(sums_sq[0]), reps)
    return MonteCarloEstimate(mean=mean, std_error=se, replications=reps)

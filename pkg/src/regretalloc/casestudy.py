"""COVID-19 vaccine trial case study: composite efficacy/safety outcomes,
conservative design noise, power-based budget, and the scenario pipeline.

The bundled scenario studies a two-group stratified trial (adults under 65,
adults 65 and over) with a composite outcome

    y = severe_covid + beta * severe_adverse_reaction,

where ``beta`` trades efficacy against safety.  Group shares follow the US
population split (0.83 / 0.17).  Two betas are bundled: 0.005 (treatment
benefits both groups under the reported rates) and 0.025 (treatment only
benefits the older group).

Design-time noise is a conservative Bernoulli approximation: the treated
arm's severe-COVID incidence is assumed equal to the control arm's, and the
control arm's adverse-reaction incidence equal to the treated arm's, which
makes the two arms' composite variances identical.  Evaluation scenarios
instead use the trial's reported incidence rates, converted to Gaussian
moments under independence of the two components.

All rates are stored as fractions; percent formatting happens only at
presentation time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

from .model import DesignProblem, GroupSpec, TruthScenario, validate_problem
from .stats import normal_quantile


class ConfigError(ValueError):
    """A scenario configuration violates the documented schema."""


@dataclass(frozen=True)
class IncidenceSpec:
    """Per-group incidence probabilities for both outcome components, plus
    the efficacy/safety tradeoff weight."""

    covid_treated: tuple[float, ...]
    covid_control: tuple[float, ...]
    ar_treated: tuple[float, ...]
    ar_control: tuple[float, ...]
    beta: float

    def __post_init__(self) -> None:
        lengths = set()
        for name in ("covid_treated", "covid_control", "ar_treated", "ar_control"):
            values = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, values)
            lengths.add(len(values))
            for g, p in enumerate(values):
                if not 0.0 <= p <= 1.0:
                    raise ConfigError(f"{name}[{g}] must be a probability, got {p}")
        if len(lengths) != 1:
            raise ConfigError("incidence lists must all have one entry per group")
        if self.beta < 0.0:
            raise ConfigError(f"beta must be nonnegative, got {self.beta}")


@dataclass(frozen=True)
class PowerSpec:
    """Inputs for the power-based total sample size: detectable effect,
    size/power quantile levels, and per-group per-arm variances to pool."""

    detectable_effect: float
    power_quantile: float
    size_quantile: float
    var_control: tuple[float, ...]
    var_treated: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.detectable_effect == 0.0:
            raise ConfigError("detectable effect must be nonzero")
        for name in ("power_quantile", "size_quantile"):
            p = getattr(self, name)
            if not 0.0 < p < 1.0:
                raise ConfigError(f"{name} must lie strictly in (0, 1), got {p}")
        object.__setattr__(self, "var_control", tuple(float(v) for v in self.var_control))
        object.__setattr__(self, "var_treated", tuple(float(v) for v in self.var_treated))


def _bernoulli_var(p: float) -> float:
    return p * (1.0 - p)


def composite_moments(spec: IncidenceSpec) -> TruthScenario:
    """Gaussian moments of the composite outcome under independence.

    Per group and arm: mean = p_covid + beta*p_ar and
    variance = p_covid*(1-p_covid) + beta^2 * p_ar*(1-p_ar); the treatment
    effect is the treated-minus-control mean and the baseline their average.
    """
    beta = spec.beta
    tau, baseline, var0, var1 = [], [], [], []
    for g in range(len(spec.covid_treated)):
        mean_treated = spec.covid_treated[g] + beta * spec.ar_treated[g]
        mean_control = spec.covid_control[g] + beta * spec.ar_control[g]
        tau.append(mean_treated - mean_control)
        baseline.append((mean_treated + mean_control) / 2.0)
        var1.append(_bernoulli_var(spec.covid_treated[g]) + beta**2 * _bernoulli_var(spec.ar_treated[g]))
        var0.append(_bernoulli_var(spec.covid_control[g]) + beta**2 * _bernoulli_var(spec.ar_control[g]))
    return TruthScenario(
        tau=tuple(tau),
        baseline=tuple(baseline),
        var_control=tuple(var0),
        var_treated=tuple(var1),
    )


def conservative_noise(
    covid_control: Sequence[float],
    ar_treated: float | Sequence[float],
    beta: float,
) -> tuple[tuple[float, float], ...]:
    """Conservative per-group (s0^2, s1^2) from baseline severe-COVID rates
    and the treated-arm adverse-reaction rate.

    Each arm is assigned the worse observed component rate (control's COVID
    incidence, treated's reaction incidence), so the two arms' composite
    variances come out identical by construction.
    """
    groups = len(covid_control)
    if isinstance(ar_treated, (int, float)):
        ar = [float(ar_treated)] * groups
    else:
        ar = [float(v) for v in ar_treated]
        if len(ar) != groups:
            raise ConfigError("ar_treated must be scalar or one entry per group")
    out = []
    for g in range(groups):
        for name, p in (("covid_control", covid_control[g]), ("ar_treated", ar[g])):
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name}[{g}] must be a probability, got {p}")
        var = _bernoulli_var(float(covid_control[g])) + beta**2 * _bernoulli_var(ar[g])
        out.append((var, var))
    return tuple(out)


def required_sample_size(spec: PowerSpec, weights: Sequence[float]) -> int:
    """Total sample size for the two-sided-free one-sided test
    N = 2*(s0^2+s1^2) * (z_power - z_size)^2 / effect^2, with per-arm
    variances pooled by the population weights, rounded up to an even total.

    The quantile levels are caller-configurable because the two documented
    conventions (80% vs 90% power quantile) give materially different sizes;
    both are reported by the CLI rather than silently chosen.
    """
    if len(weights) != len(spec.var_control):
        raise ConfigError("weights and variance lists differ in length")
    pooled_control = sum(w * v for w, v in zip(weights, spec.var_control))
    pooled_treated = sum(w * v for w, v in zip(weights, spec.var_treated))
    z_power = normal_quantile(spec.power_quantile)
    z_size = normal_quantile(spec.size_quantile)
    raw = (
        2.0
        * (pooled_control + pooled_treated)
        * (z_power - z_size) ** 2
        / spec.detectable_effect**2
    )
    return 2 * math.ceil(raw / 2.0)


# ---------------------------------------------------------------------------
# Scenario configuration
# ---------------------------------------------------------------------------

DEFAULT_CONFIG: dict[str, Any] = {
    "weights": [0.83, 0.17],
    "budget": 9320,
    "groups": [
        {
            "label": "18 to <65 yr",
            "design": {"covid_control": 0.007, "ar_treated": 0.067},
            "reported": {
                "covid_treated": 0.0,
                "covid_control": 0.0019,
                "ar_treated": 0.1455,
                "ar_control": 0.0253,
            },
        },
        {
            "label": ">=65 yr",
            "design": {"covid_control": 0.025, "ar_treated": 0.067},
            "reported": {
                "covid_treated": 0.0,
                "covid_control": 0.0028,
                "ar_treated": 0.0950,
                "ar_control": 0.0248,
            },
        },
    ],
    "beta_cases": [0.005, 0.025],
    "power": {
        "detectable_effect": -0.006,
        "power_quantile": 0.90,
        "size_quantile": 0.05,
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed and validated scenario configuration."""

    weights: tuple[float, ...]
    budget: int
    labels: tuple[str, ...]
    design_covid_control: tuple[float, ...]
    design_ar_treated: tuple[float, ...]
    reported: dict[str, tuple[float, ...]]
    beta_cases: tuple[float, ...]
    detectable_effect: float
    power_quantile: float
    size_quantile: float


def _require_keys(obj: dict, allowed: set[str], required: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{path}: missing key(s) {sorted(missing)}")


def _as_probability(value: Any, path: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise ConfigError(f"{path}: expected a probability in [0, 1], got {v}")
    return v


def parse_config(obj: dict[str, Any]) -> ScenarioConfig:
    """Validate a JSON-compatible scenario document; unknown keys rejected,
    violations reported with their field path."""
    if not isinstance(obj, dict):
        raise ConfigError("config root must be an object")
    _require_keys(
        obj,
        allowed={"weights", "budget", "groups", "beta_cases", "power"},
        required={"weights", "budget", "groups", "beta_cases", "power"},
        path="config",
    )
    weights = obj["weights"]
    if not isinstance(weights, list) or not weights:
        raise ConfigError("weights: expected a nonempty list")
    weights = tuple(float(w) for w in weights)
    budget = obj["budget"]
    if not isinstance(budget, int) or isinstance(budget, bool) or budget <= 0:
        raise ConfigError(f"budget: expected a positive integer, got {budget!r}")
    groups = obj["groups"]
    if not isinstance(groups, list) or len(groups) != len(weights):
        raise ConfigError(
            f"groups: expected a list with one entry per weight ({len(weights)})"
        )
    labels, design_cc, design_ar = [], [], []
    reported: dict[str, list[float]] = {
        "covid_treated": [],
        "covid_control": [],
        "ar_treated": [],
        "ar_control": [],
    }
    for g, entry in enumerate(groups):
        path = f"groups[{g}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: expected an object")
        _require_keys(
            entry,
            allowed={"label", "design", "reported"},
            required={"label", "design", "reported"},
            path=path,
        )
        if not isinstance(entry["label"], str):
            raise ConfigError(f"{path}.label: expected a string")
        labels.append(entry["label"])
        design = entry["design"]
        if not isinstance(design, dict):
            raise ConfigError(f"{path}.design: expected an object")
        _require_keys(
            design,
            allowed={"covid_control", "ar_treated"},
            required={"covid_control", "ar_treated"},
            path=f"{path}.design",
        )
        design_cc.append(_as_probability(design["covid_control"], f"{path}.design.covid_control"))
        design_ar.append(_as_probability(design["ar_treated"], f"{path}.design.ar_treated"))
        rep = entry["reported"]
        if not isinstance(rep, dict):
            raise ConfigError(f"{path}.reported: expected an object")
        _require_keys(
            rep,
            allowed=set(reported),
            required=set(reported),
            path=f"{path}.reported",
        )
        for key in reported:
            reported[key].append(_as_probability(rep[key], f"{path}.reported.{key}"))
    beta_cases = obj["beta_cases"]
    if not isinstance(beta_cases, list) or not beta_cases:
        raise ConfigError("beta_cases: expected a nonempty list")
    for i, b in enumerate(beta_cases):
        if not isinstance(b, (int, float)) or isinstance(b, bool) or b < 0:
            raise ConfigError(f"beta_cases[{i}]: expected a nonnegative number, got {b!r}")
    power = obj["power"]
    if not isinstance(power, dict):
        raise ConfigError("power: expected an object")
    _require_keys(
        power,
        allowed={"detectable_effect", "power_quantile", "size_quantile"},
        required={"detectable_effect", "power_quantile", "size_quantile"},
        path="power",
    )
    effect = power["detectable_effect"]
    if not isinstance(effect, (int, float)) or isinstance(effect, bool) or effect == 0:
        raise ConfigError("power.detectable_effect: expected a nonzero number")
    return ScenarioConfig(
        weights=weights,
        budget=budget,
        labels=tuple(labels),
        design_covid_control=tuple(design_cc),
        design_ar_treated=tuple(design_ar),
        reported={k: tuple(v) for k, v in reported.items()},
        beta_cases=tuple(float(b) for b in beta_cases),
        detectable_effect=float(effect),
        power_quantile=_as_probability(power["power_quantile"], "power.power_quantile"),
        size_quantile=_as_probability(power["size_quantile"], "power.size_quantile"),
    )


def load_config(path: str) -> ScenarioConfig:
    """Read and validate a scenario file; JSON parse errors become ConfigError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(obj)


@dataclass(frozen=True)
class CaseStudyCase:
    """One tradeoff case: a design problem built from conservative noise and
    the evaluation scenario built from the reported incidence rates."""

    beta: float
    problem: DesignProblem
    truth: TruthScenario
    power: PowerSpec


def build_case_study(config: ScenarioConfig) -> tuple[CaseStudyCase, ...]:
    """Assemble one problem/truth pair per tradeoff weight in the config.

    The design problem uses the fixed budget and the conservative variance
    approximation; the truth scenario uses the reported rates.  Each case
    also carries a PowerSpec over its own conservative variances so sample
    sizes under both quantile conventions can be reported.
    """
    cases = []
    for beta in config.beta_cases:
        noise = conservative_noise(config.design_covid_control, config.design_ar_treated, beta)
        groups = tuple(
            GroupSpec(
                label=config.labels[g],
                weight=config.weights[g],
                var_control=noise[g][0],
                var_treated=noise[g][1],
            )
            for g in range(len(config.weights))
        )
        problem = validate_problem(DesignProblem(budget=config.budget, groups=groups))
        truth = composite_moments(
            IncidenceSpec(
                covid_treated=config.reported["covid_treated"],
                covid_control=config.reported["covid_control"],
                ar_treated=config.reported["ar_treated"],
                ar_control=config.reported["ar_control"],
                beta=beta,
            )
        )
        power = PowerSpec(
            detectable_effect=config.detectable_effect,
            power_quantile=config.power_quantile,
            size_quantile=config.size_quantile,
            var_control=tuple(v[0] for v in noise),
            var_treated=tuple(v[1] for v in noise),
        )
        cases.append(CaseStudyCase(beta=beta, problem=problem, truth=truth, power=power))
    return tuple(cases)


def default_config() -> ScenarioConfig:
    """The bundled two-group COVID-19 vaccine scenario."""
    return parse_config(json.loads(json.dumps(DEFAULT_CONFIG)))

"""Composite outcomes, conservative noise, power-based sizing, config parsing."""

import dataclasses
import json
import math

import pytest

from regretalloc.allocate import minimax_allocation
from regretalloc.casestudy import (
    ConfigError,
    DEFAULT_CONFIG,
    IncidenceSpec,
    PowerSpec,
    build_case_study,
    composite_moments,
    conservative_noise,
    default_config,
    load_config,
    parse_config,
    required_sample_size,
)
from reference_values import (
    ORACLE_DESIGN_NOISE,
    ORACLE_REQUIRED_N,
    ORACLE_TRUTH_NOISE,
    ORACLE_TRUTH_TAU,
    REF_DESIGN_NOISE_PCT,
    REF_TRUTH_NOISE_PCT,
    REF_TRUTH_TAU_PCT,
)

REPORTED = {
    "covid_treated": (0.0, 0.0),
    "covid_control": (0.0019, 0.0028),
    "ar_treated": (0.1455, 0.0950),
    "ar_control": (0.0253, 0.0248),
}


def reported_spec(beta):
    return IncidenceSpec(beta=beta, **REPORTED)


class TestCompositeMoments:
    @pytest.mark.parametrize("beta", [0.005, 0.025])
    def test_matches_reference_within_print_precision(self, beta):
        truth = composite_moments(reported_spec(beta))
        for g in range(2):
            ref_tau = float(REF_TRUTH_TAU_PCT[beta][g]) / 100.0
            ref_noise = float(REF_TRUTH_NOISE_PCT[beta][g]) / 100.0
            assert abs(truth.tau[g] - ref_tau) <= 0.01e-2
            assert abs(math.sqrt(truth.var_sums[g]) - ref_noise) <= 0.02e-2

    @pytest.mark.parametrize("beta", [0.005, 0.025])
    def test_matches_oracle_tightly(self, beta):
        truth = composite_moments(reported_spec(beta))
        assert truth.tau == pytest.approx(ORACLE_TRUTH_TAU[beta], rel=1e-9)
        noise = tuple(math.sqrt(v) for v in truth.var_sums)
        assert noise == pytest.approx(ORACLE_TRUTH_NOISE[beta], rel=1e-7)

    def test_degenerate_zero_incidence(self):
        spec = IncidenceSpec(
            covid_treated=(0.0,), covid_control=(0.0,),
            ar_treated=(0.3,), ar_control=(0.1,),
            beta=0.0,
        )
        truth = composite_moments(spec)
        assert truth.tau == (0.0,)
        assert truth.var_sums == (0.0,)

    def test_baseline_is_arm_average(self):
        truth = composite_moments(reported_spec(0.005))
        mean_treated = 0.0 + 0.005 * 0.1455
        mean_control = 0.0019 + 0.005 * 0.0253
        assert truth.baseline[0] == pytest.approx((mean_treated + mean_control) / 2.0, rel=1e-12)

    def test_mean_linear_variance_quadratic_in_beta(self):
        betas = (0.01, 0.02, 0.03)
        truths = [composite_moments(reported_spec(b)) for b in betas]
        for g in range(2):
            taus = [t.tau[g] for t in truths]
            assert taus[0] + taus[2] - 2 * taus[1] == pytest.approx(0.0, abs=1e-15)
            variances = [t.var_treated[g] for t in truths]
            second_difference = variances[0] + variances[2] - 2 * variances[1]
            ar = REPORTED["ar_treated"][g]
            assert second_difference == pytest.approx(
                2 * 0.01**2 * ar * (1 - ar), rel=1e-9
            )

    def test_rejects_bad_probability(self):
        with pytest.raises(ConfigError, match="covid_treated"):
            IncidenceSpec(
                covid_treated=(1.5,), covid_control=(0.0,),
                ar_treated=(0.0,), ar_control=(0.0,), beta=0.1,
            )

    def test_rejects_ragged_group_lists(self):
        with pytest.raises(ConfigError, match="per group"):
            IncidenceSpec(
                covid_treated=(0.0, 0.0), covid_control=(0.1,),
                ar_treated=(0.1, 0.1), ar_control=(0.1, 0.1), beta=0.1,
            )


class TestConservativeNoise:
    @pytest.mark.parametrize("beta", [0.005, 0.025])
    def test_matches_reference(self, beta):
        noise = conservative_noise((0.007, 0.025), 0.067, beta)
        for g in range(2):
            level = math.sqrt(noise[g][0] + noise[g][1])
            assert abs(level - float(REF_DESIGN_NOISE_PCT[beta][g]) / 100.0) <= 0.05e-2
            assert level == pytest.approx(ORACLE_DESIGN_NOISE[beta][g], rel=1e-7)

    def test_arms_are_symmetric_by_construction(self):
        noise = conservative_noise((0.007, 0.025), 0.067, 0.025)
        for s0, s1 in noise:
            assert s0 == s1

    def test_zero_rates_give_zero_variance(self):
        assert conservative_noise((0.0, 0.0), 0.0, 0.5) == ((0.0, 0.0), (0.0, 0.0))

    def test_per_group_reaction_rates_accepted(self):
        scalar = conservative_noise((0.01, 0.02), 0.05, 0.1)
        vector = conservative_noise((0.01, 0.02), (0.05, 0.05), 0.1)
        assert scalar == vector
        with pytest.raises(ConfigError, match="one entry per group"):
            conservative_noise((0.01, 0.02), (0.05,), 0.1)


class TestRequiredSampleSize:
    def make_spec(self, beta, power_quantile):
        noise = conservative_noise((0.007, 0.025), 0.067, beta)
        return PowerSpec(
            detectable_effect=-0.006,
            power_quantile=power_quantile,
            size_quantile=0.05,
            var_control=tuple(v[0] for v in noise),
            var_treated=tuple(v[1] for v in noise),
        )

    @pytest.mark.parametrize("beta", [0.005, 0.025])
    @pytest.mark.parametrize("power_quantile", [0.90, 0.80])
    def test_case_study_values(self, beta, power_quantile):
        spec = self.make_spec(beta, power_quantile)
        assert required_sample_size(spec, (0.83, 0.17)) == ORACLE_REQUIRED_N[beta][power_quantile]

    def test_result_is_even(self):
        spec = self.make_spec(0.005, 0.9)
        assert required_sample_size(spec, (0.83, 0.17)) % 2 == 0

    def test_doubling_variances_doubles_n(self):
        spec = self.make_spec(0.005, 0.9)
        doubled = PowerSpec(
            detectable_effect=spec.detectable_effect,
            power_quantile=spec.power_quantile,
            size_quantile=spec.size_quantile,
            var_control=tuple(2 * v for v in spec.var_control),
            var_treated=tuple(2 * v for v in spec.var_treated),
        )
        n = required_sample_size(spec, (0.83, 0.17))
        assert abs(required_sample_size(doubled, (0.83, 0.17)) - 2 * n) <= 2

    def test_halving_effect_quadruples_n(self):
        spec = self.make_spec(0.005, 0.9)
        halved = dataclasses.replace(spec, detectable_effect=spec.detectable_effect / 2.0)
        n = required_sample_size(spec, (0.83, 0.17))
        assert abs(required_sample_size(halved, (0.83, 0.17)) - 4 * n) <= 6

    def test_monotone_in_power_and_variance(self):
        previous = 0
        for power_quantile in (0.5, 0.6, 0.7, 0.8, 0.9, 0.95):
            n = required_sample_size(self.make_spec(0.005, power_quantile), (0.83, 0.17))
            assert n >= previous
            previous = n
        base = self.make_spec(0.005, 0.9)
        previous = 0
        for scale in (1.0, 1.5, 2.0, 4.0):
            scaled = dataclasses.replace(
                base,
                var_control=tuple(scale * v for v in base.var_control),
                var_treated=tuple(scale * v for v in base.var_treated),
            )
            n = required_sample_size(scaled, (0.83, 0.17))
            assert n >= previous
            previous = n

    def test_zero_effect_rejected(self):
        with pytest.raises(ConfigError, match="nonzero"):
            PowerSpec(
                detectable_effect=0.0, power_quantile=0.9, size_quantile=0.05,
                var_control=(1.0,), var_treated=(1.0,),
            )

    def test_weight_length_mismatch(self):
        with pytest.raises(ConfigError, match="length"):
            required_sample_size(self.make_spec(0.005, 0.9), (1.0,))


class TestConfigParsing:
    def test_default_config_parses(self):
        config = default_config()
        assert config.weights == (0.83, 0.17)
        assert config.budget == 9320
        assert config.beta_cases == (0.005, 0.025)

    def test_unknown_key_rejected_with_path(self):
        broken = json.loads(json.dumps(DEFAULT_CONFIG))
        broken["groups"][0]["design"]["bonus"] = 1
        with pytest.raises(ConfigError, match=r"groups\[0\].design"):
            parse_config(broken)

    def test_unknown_top_level_key_rejected(self):
        broken = json.loads(json.dumps(DEFAULT_CONFIG))
        broken["extra"] = True
        with pytest.raises(ConfigError, match="extra"):
            parse_config(broken)

    def test_missing_key_reported(self):
        broken = json.loads(json.dumps(DEFAULT_CONFIG))
        del broken["groups"][1]["reported"]["ar_control"]
        with pytest.raises(ConfigError, match=r"groups\[1\].reported"):
            parse_config(broken)

    def test_probability_out_of_range_reported_with_path(self):
        broken = json.loads(json.dumps(DEFAULT_CONFIG))
        broken["groups"][0]["reported"]["ar_treated"] = 1.7
        with pytest.raises(ConfigError, match=r"groups\[0\].reported.ar_treated"):
            parse_config(broken)

    def test_group_weight_count_mismatch(self):
        broken = json.loads(json.dumps(DEFAULT_CONFIG))
        broken["weights"] = [1.0]
        with pytest.raises(ConfigError, match="groups"):
            parse_config(broken)

    def test_budget_type_checked(self):
        broken = json.loads(json.dumps(DEFAULT_CONFIG))
        broken["budget"] = "many"
        with pytest.raises(ConfigError, match="budget"):
            parse_config(broken)

    def test_load_config_round_trips(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(DEFAULT_CONFIG))
        assert load_config(str(path)) == default_config()

    def test_load_config_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(str(path))

    def test_bundled_config_file_matches_default(self):
        from pathlib import Path

        bundled = Path(__file__).resolve().parents[1] / "configs" / "covid_trial.json"
        assert load_config(str(bundled)) == default_config()


class TestBuildCaseStudy:
    def test_two_cases_with_design_noise(self, covid_cases):
        assert [case.beta for case in covid_cases] == [0.005, 0.025]
        for case, beta in zip(covid_cases, (0.005, 0.025)):
            assert case.problem.budget == 9320
            assert case.problem.weights == (0.83, 0.17)
            for g in range(2):
                assert math.sqrt(case.problem.var_sums[g]) == pytest.approx(
                    ORACLE_DESIGN_NOISE[beta][g], rel=1e-7
                )
            assert case.truth.tau == pytest.approx(ORACLE_TRUTH_TAU[beta], rel=1e-9)

    def test_power_spec_uses_case_variances(self, covid_cases):
        for case in covid_cases:
            assert case.power.var_control == tuple(g.var_control for g in case.problem.groups)
            assert case.power.power_quantile == 0.90
            assert case.power.size_quantile == 0.05

    def test_single_group_pipeline_degenerates(self):
        config = {
            "weights": [1.0],
            "budget": 100,
            "groups": [DEFAULT_CONFIG["groups"][0]],
            "beta_cases": [0.005],
            "power": DEFAULT_CONFIG["power"],
        }
        cases = build_case_study(parse_config(json.loads(json.dumps(config))))
        assert len(cases) == 1
        assert minimax_allocation(cases[0].problem).counts == (100,)

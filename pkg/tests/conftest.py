import pytest
from hypothesis import HealthCheck, settings

from regretalloc import build_case_study, default_config

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def covid_cases():
    """The two bundled tradeoff cases (beta = 0.005 and beta = 0.025)."""
    return build_case_study(default_config())

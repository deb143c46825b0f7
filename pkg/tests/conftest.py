import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from impairdetect.dataset import GeneratorConfig, generate_synthetic

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def default_population():
    """Default 100/99 synthetic population."""
    return generate_synthetic(GeneratorConfig(seed=7))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

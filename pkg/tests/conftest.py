import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from pooldesign import CtPopulation, DetectionCurve

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def default_pop() -> CtPopulation:
    """Calibrated default population: 25% of shifted draws exceed Ct 35."""
    return CtPopulation()


@pytest.fixture(scope="session")
def step35() -> DetectionCurve:
    return DetectionCurve.step(35.0)

import sys

import pytest
from hypothesis import HealthCheck, settings

from cechain.exactmath import FieldSpec

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def big():
    return FieldSpec.prime((1 << 61) - 1)


@pytest.fixture
def Q():
    return FieldSpec.rational()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])

import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow], derandomize=True)
settings.load_profile("default")

PRESETS = ("fig8", "twist4", "twist5", "twist6", "twist7")


@pytest.fixture(scope="session")
def fig8():
    from famedkit.triangulation import load_preset

    return load_preset("fig8")


@pytest.fixture(scope="session")
def fig8_alpha(fig8):
    from famedkit.angle_structures import maximize_volume

    return maximize_volume(fig8).maximizer


@pytest.fixture(scope="session", params=PRESETS)
def preset(request):
    from famedkit.triangulation import load_preset

    return load_preset(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = [c.line() for _, c in sorted(getattr(mod, "_cache", {}).items())]
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)

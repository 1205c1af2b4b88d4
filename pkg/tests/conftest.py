import os
import sys

import numpy as np
import pytest
from hypothesis import settings

from geohydro.grid import nodes

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("stress", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def x64():
    return nodes(64)


def smooth_field(rng, n, modes=5, amplitude=0.5):
    x = nodes(n)
    k = np.arange(1, modes + 1)
    a = rng.normal(size=modes) * amplitude / k
    b = rng.normal(size=modes) * amplitude / k
    return np.cos(np.outer(x, k)) @ a + np.sin(np.outer(x, k)) @ b


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])

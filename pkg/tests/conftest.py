import math

import numpy as np
import pytest

from elbowpaf import kernels


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    return kernels.available_backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bilinear_oracle(values, x, y):
    """Direct four-term weighted sum, written independently of the kernels."""
    h, w = values.shape[:2]
    x0 = min(int(math.floor(x)), max(w - 2, 0))
    y0 = min(int(math.floor(y)), max(h - 2, 0))
    x1, y1 = min(x0 + 1, w - 1), min(y0 + 1, h - 1)
    ax, ay = x - x0, y - y0
    return ((1 - ax) * (1 - ay) * values[y0, x0] + ax * (1 - ay) * values[y0, x1]
            + (1 - ax) * ay * values[y1, x0] + ax * ay * values[y1, x1])


# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1][2:])):
            terminalreporter.write_line(line)

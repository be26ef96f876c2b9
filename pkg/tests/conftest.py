import sys
import math

import numpy as np
import pytest

from realzeros.covariance import CovarianceModel


def raised_cosine(phi):
    return (1.0 + 0.5 * np.cos(phi)) / (2 * math.pi)


def catalog():
    """One representative of every model kind (all with unit variance)."""
    return [
        CovarianceModel.independent(),
        CovarianceModel.exponential(0.3),
        CovarianceModel.exponential(-0.5),
        CovarianceModel.constant(0.5),
        CovarianceModel.moving_average([1.0, 0.5, 0.25]),
        CovarianceModel.tabulated([1.0, 0.4, 0.1]),
        CovarianceModel.spectral(raised_cosine),
    ]


def density_catalog():
    return [m for m in catalog() if m.has_density]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)

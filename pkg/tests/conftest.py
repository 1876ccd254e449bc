"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from convbsde import build_grid


@pytest.fixture(scope="session")
def pricing_grid():
    """Default log-price grid centered at ln(100) used by pricing tests."""
    return build_grid(float(np.log(100.0)), 5.0, 12)

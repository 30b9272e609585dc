import numpy as np
import pytest


@pytest.fixture
def line_three():
    """Points {0, 1, 3} on a line; the small worked instance used throughout."""
    pts = np.array([[0.0], [1.0], [3.0]])
    D = np.abs(pts - pts.T)
    return pts, D


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

import numpy as np
import pytest

from zominimax import EuclideanBall, make_quadratic, make_trig


@pytest.fixture
def desk_quadratic():
    """Coupled quadratic desk instance: d=(4,3), tau=1, kappa=2, ball R=1."""
    return make_quadratic(4, 3, tau=1.0, kappa=2.0, seed=11)


@pytest.fixture
def desk_trig():
    """Nonconvex desk instance: d=(4,3), tau=1, kappa=2, ball R=1."""
    return make_trig(4, 3, tau=1.0, kappa=2.0, seed=11)


@pytest.fixture
def both_fixtures(desk_quadratic, desk_trig):
    return {"quadratic": desk_quadratic, "trig": desk_trig}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_ball(d, radius=1.0):
    return EuclideanBall(np.zeros(d), radius)

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from zominimax import Box, EuclideanBall, WholeSpace, constraint_set_from_config

SETS = [
    EuclideanBall(np.zeros(3), 1.0),
    EuclideanBall(np.array([1.0, -2.0]), 0.7),
    Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0])),
    Box(np.array([-0.3, 0.0, 2.0]), np.array([0.3, 5.0, 2.5])),
    WholeSpace(4),
]


def test_ball_projection_exterior_scales_radially():
    ball = EuclideanBall(np.zeros(2), 1.0)
    assert_allclose(ball.project([2.0, 0.0]), [1.0, 0.0])


def test_ball_projection_interior_is_identity():
    ball = EuclideanBall(np.zeros(2), 1.0)
    assert_allclose(ball.project([0.3, 0.4]), [0.3, 0.4])


def test_box_projection_clamps_componentwise():
    box = Box([-1.0, -1.0], [1.0, 1.0])
    assert_allclose(box.project([2.0, -3.0]), [1.0, -1.0])


def test_diameters():
    assert EuclideanBall(np.array([3.0, -1.0]), 0.5).diameter() == 1.0
    assert Box([0.0, 0.0], [3.0, 4.0]).diameter() == 5.0
    assert math.isinf(WholeSpace(7).diameter())
    assert not WholeSpace(7).is_bounded
    assert EuclideanBall(np.zeros(1), 2.0).is_bounded


@pytest.mark.parametrize("set_y", SETS, ids=lambda s: repr(s))
def test_projection_properties(set_y):
    rng = np.random.default_rng(99)
    for _ in range(50):
        p = 4.0 * rng.standard_normal(set_y.dim)
        proj = set_y.project(p)
        # feasibility and idempotence
        assert set_y.contains(proj)
        assert_allclose(set_y.project(proj), proj, atol=1e-12)
        # nonexpansiveness
        q = 4.0 * rng.standard_normal(set_y.dim)
        assert np.linalg.norm(set_y.project(p) - set_y.project(q)) <= np.linalg.norm(
            p - q
        ) + 1e-12
        # optimality against random feasible competitors
        feas = set_y.project(4.0 * rng.standard_normal(set_y.dim))
        assert np.linalg.norm(p - proj) <= np.linalg.norm(p - feas) + 1e-12


def test_dimension_mismatch_raises():
    ball = EuclideanBall(np.zeros(3), 1.0)
    with pytest.raises(ValueError, match="dimension"):
        ball.project(np.zeros(2))
    with pytest.raises(ValueError, match="dimension"):
        ball.contains(np.zeros(4))


def test_invalid_parameters_raise():
    with pytest.raises(ValueError):
        EuclideanBall(np.zeros(2), 0.0)
    with pytest.raises(ValueError):
        EuclideanBall(np.zeros(2), -1.0)
    with pytest.raises(ValueError):
        Box([1.0, 0.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        WholeSpace(0)


def test_from_config():
    ball = constraint_set_from_config({"kind": "ball", "radius": 2.0}, 3)
    assert isinstance(ball, EuclideanBall) and ball.radius == 2.0 and ball.dim == 3
    ball2 = constraint_set_from_config(
        {"kind": "ball", "radius": 1.0, "center": [1.0, 0.0]}, 2
    )
    assert_allclose(ball2.center, [1.0, 0.0])
    box = constraint_set_from_config({"kind": "box", "half_width": 0.5}, 2)
    assert isinstance(box, Box) and box.diameter() == pytest.approx(np.sqrt(2.0))
    whole = constraint_set_from_config({"kind": "whole"}, 5)
    assert isinstance(whole, WholeSpace) and whole.dim == 5
    with pytest.raises(ValueError, match="kind"):
        constraint_set_from_config({"kind": "simplex"}, 2)
    with pytest.raises(ValueError, match="radius"):
        constraint_set_from_config({"kind": "ball"}, 2)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mavloc import (
    FovParams,
    NoiseModel,
    Pose,
    fov_contains,
    jacobian_h,
    observe,
    predict_observation,
    wrap_angle,
)
from oracles import fd_observation_jacobian

FOV = FovParams(math.radians(120.0), 1.0)
NO_NOISE = NoiseModel(0.0)


def test_fov_contains_on_axis_in_range():
    assert fov_contains(Pose(0, 0, 0), FOV, (0.5, 0.0))


def test_fov_excludes_point_behind():
    assert not fov_contains(Pose(0, 0, 0), FOV, (-0.5, 0.0))


def test_fov_excludes_point_beyond_range():
    assert not fov_contains(Pose(0, 0, 0), FOV, (2.0, 0.0))


def test_fov_boundary_is_open():
    assert not fov_contains(Pose(0, 0, 0), FOV, (1.0, 0.0))  # r == r_max
    assert not fov_contains(Pose(0, 0, 0), FOV, (0.0, 0.0))  # r == 0
    # bearing exactly at the half-aperture
    half = math.radians(60)
    assert not fov_contains(
        Pose(0, 0, 0), FOV, (0.5 * math.cos(half), 0.5 * math.sin(half))
    )


def test_fov_params_validation():
    with pytest.raises(ValueError):
        FovParams(0.0, 1.0)
    with pytest.raises(ValueError):
        FovParams(7.0, 1.0)
    with pytest.raises(ValueError):
        FovParams(1.0, 0.0)


def test_predict_observation_on_axis():
    obs = predict_observation(Pose(0, 0, 0), (1.0, 0.0))
    assert (obs.r, obs.alpha) == pytest.approx((1.0, 0.0))


def test_predict_observation_heading_aligned():
    obs = predict_observation(Pose(0, 0, math.pi / 2), (0.0, 2.0))
    assert (obs.r, obs.alpha) == pytest.approx((2.0, 0.0))


def test_predict_observation_quarter_turn():
    obs = predict_observation(Pose(1, 1, 0), (1.0, 2.0))
    assert (obs.r, obs.alpha) == pytest.approx((1.0, math.pi / 2))


def test_predict_observation_coincident_raises():
    with pytest.raises(ValueError):
        predict_observation(Pose(1, 1, 0), (1.0, 1.0))


def test_observe_outside_fov_is_none():
    rng = np.random.default_rng(0)
    assert observe(Pose(0, 0, 0), (3.0, 0.0), FOV, NO_NOISE, NO_NOISE, rng) is None


def test_observe_zero_noise_equals_prediction():
    rng = np.random.default_rng(0)
    obs = observe(Pose(0, 0, 0), (0.5, 0.0), FOV, NO_NOISE, NO_NOISE, rng)
    assert (obs.r, obs.alpha) == pytest.approx((0.5, 0.0))


def test_observe_range_noise_calibration():
    rng = np.random.default_rng(5)
    noise_r = NoiseModel(0.1)
    noise_a = NoiseModel(0.05)
    rs = np.array(
        [
            observe(Pose(0, 0, 0), (0.5, 0.0), FOV, noise_r, noise_a, rng).r
            for _ in range(100_000)
        ]
    )
    assert abs(rs.std() - 0.05) <= 0.0015  # 3% of sigma = 0.1 * 0.5


@settings(max_examples=200)
@given(
    st.floats(-4.0, 4.0),
    st.floats(-4.0, 4.0),
    st.floats(-math.pi, math.pi),
    st.floats(-2.0, 2.0),
    st.floats(-2.0, 2.0),
)
def test_observe_none_exactly_when_outside_fov(x, y, phi, bx, by):
    pose = Pose(x, y, phi)
    rng = np.random.default_rng(0)
    obs = observe(pose, (bx, by), FOV, NO_NOISE, NO_NOISE, rng)
    assert (obs is None) == (not fov_contains(pose, FOV, (bx, by)))


@settings(max_examples=200)
@given(
    st.floats(-3.0, 3.0),
    st.floats(-3.0, 3.0),
    st.floats(-math.pi, math.pi),
    st.floats(0.2, 5.0),
    st.floats(-math.pi, math.pi),
    st.floats(-math.pi, math.pi),
)
def test_bearing_frame_rotation_invariance(x, y, phi, dist, direction, beta):
    """Rotating heading and target together about the anchor leaves (r, a) fixed."""
    pose = Pose(x, y, phi)
    target = (x + dist * math.cos(direction), y + dist * math.sin(direction))
    base = predict_observation(pose, target)

    rotated_pose = Pose(x, y, phi + beta)
    dx, dy = target[0] - x, target[1] - y
    rotated_target = (
        x + dx * math.cos(beta) - dy * math.sin(beta),
        y + dx * math.sin(beta) + dy * math.cos(beta),
    )
    turned = predict_observation(rotated_pose, rotated_target)
    assert turned.r == pytest.approx(base.r, rel=1e-9)
    assert wrap_angle(turned.alpha - base.alpha) == pytest.approx(0.0, abs=1e-9)


def test_jacobian_identity_at_unit_range_on_axis():
    assert np.allclose(jacobian_h(Pose(0, 0, 0), (1.0, 0.0)), np.eye(2))


def test_jacobian_above_at_range_two():
    jac = jacobian_h(Pose(0, 0, 0), (0.0, 2.0))
    assert np.allclose(jac, [[0.0, 1.0], [-0.5, 0.0]], atol=1e-12)
    assert np.allclose(jac, fd_observation_jacobian(Pose(0, 0, 0), (0.0, 2.0)), atol=1e-7)


def test_jacobian_on_axis_at_range_two():
    jac = jacobian_h(Pose(0, 0, 0), (2.0, 0.0))
    assert np.allclose(jac, [[1.0, 0.0], [0.0, 0.5]], atol=1e-12)
    assert np.allclose(jac, fd_observation_jacobian(Pose(0, 0, 0), (2.0, 0.0)), atol=1e-7)


def test_jacobian_singular_at_zero_range():
    with pytest.raises(ValueError):
        jacobian_h(Pose(0, 0, 0), (0.0, 0.0))


def test_jacobian_matches_finite_differences_randomized():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        pose = Pose(*rng.uniform(-5, 5, size=2), rng.uniform(-math.pi, math.pi))
        direction = rng.uniform(-math.pi, math.pi)
        dist = rng.uniform(0.1, 5.0)
        target = (
            pose.x1 + dist * math.cos(direction),
            pose.x2 + dist * math.sin(direction),
        )
        jac = jacobian_h(pose, target)
        fd = fd_observation_jacobian(pose, target)
        assert np.linalg.norm(jac - fd) <= 1e-5 * max(np.linalg.norm(jac), 1.0)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mavloc import (
    Belief,
    EstimationError,
    NoiseModel,
    Observation,
    Pose,
    correct,
    initial_belief,
    predict,
    rank_by_uncertainty,
    uncertainty,
)
from mavloc.estimation import measurement_noise_cov, motion_process_noise
from oracles import grid_bayes_posterior


def diag_belief(mx, my, vx, vy):
    return Belief((mx, my), np.diag([vx, vy]))


def test_predict_linear_gaussian_propagation():
    out = predict(diag_belief(0, 0, 0.1, 0.1), (1.0, 0.0), np.diag([0.04, 0.04]))
    assert np.allclose(out.mean, [1.0, 0.0])
    assert np.allclose(out.cov, np.diag([0.14, 0.14]))


def test_predict_identity_with_zero_inputs():
    belief = diag_belief(0.3, -0.2, 0.05, 0.07)
    out = predict(belief, (0.0, 0.0), np.zeros((2, 2)))
    assert np.array_equal(out.mean, belief.mean)
    assert np.array_equal(out.cov, belief.cov)


def test_predict_trace_accumulates_additively():
    belief = diag_belief(0, 0, 0.0, 0.0)
    q = np.diag([0.04, 0.04])
    for _ in range(10):
        belief = predict(belief, (0.0, 0.0), q)
    assert uncertainty(belief) == pytest.approx(0.8)


def test_uncertainty_is_covariance_trace():
    assert uncertainty(diag_belief(0, 0, 0.3, 0.2)) == pytest.approx(0.5)
    assert uncertainty(diag_belief(0, 0, 0.0, 0.0)) == 0.0
    assert uncertainty(Belief((0, 0), [[0.2, 0.1], [0.1, 0.2]])) == pytest.approx(0.4)


def test_rank_by_uncertainty_descending_with_index_ties():
    beliefs = [diag_belief(0, 0, t / 2, t / 2) for t in (0.1, 0.5, 0.3)]
    assert rank_by_uncertainty(beliefs) == [1, 2, 0]
    equal = [diag_belief(0, 0, 0.1, 0.1) for _ in range(4)]
    assert rank_by_uncertainty(equal) == [0, 1, 2, 3]
    assert rank_by_uncertainty([diag_belief(0, 0, 1, 1)]) == [0]


@given(st.lists(st.floats(0.01, 10.0), min_size=1, max_size=12), st.floats(0.1, 7.0))
def test_rank_is_permutation_and_scale_invariant(traces, scale):
    beliefs = [diag_belief(0, 0, t / 2, t / 2) for t in traces]
    order = rank_by_uncertainty(beliefs)
    assert sorted(order) == list(range(len(traces)))
    scaled = [Belief(b.mean, b.cov * scale) for b in beliefs]
    assert rank_by_uncertainty(scaled) == order


def test_motion_process_noise_uses_command_and_floor():
    q = motion_process_noise((1.0, 0.0), NoiseModel(0.2, 0.05))
    assert np.allclose(q, np.diag([0.04, 0.0025]))


def test_measurement_noise_cov_floors_apply():
    r_cov = measurement_noise_cov(0.5, 0.0, NoiseModel(0.1, 0.05), NoiseModel(0.05, 0.03))
    assert np.allclose(r_cov, np.diag([0.0025, 0.0009]))


def test_correct_zero_innovation_keeps_mean_reduces_trace():
    amav = Pose(0, 0, 0)
    belief = diag_belief(1.0, 0.5, 0.09, 0.09)
    obs = Observation(math.hypot(1.0, 0.5), math.atan2(0.5, 1.0))
    out = correct(belief, obs, amav, np.diag([0.01, 0.0025]))
    assert np.allclose(out.mean, belief.mean, atol=1e-12)
    assert uncertainty(out) < uncertainty(belief)


def test_correct_range_only_matches_conjugate_gaussian():
    # Bearing row made uninformative: posterior x-variance follows the 1-D
    # precision sum, y stays at the prior.
    amav = Pose(0, 0, 0)
    prior_var, obs_var = 0.09, 0.01
    belief = diag_belief(2.0, 0.0, prior_var, prior_var)
    out = correct(belief, Observation(1.9, 0.0), amav, np.diag([obs_var, 1e9]))
    expected = 1.0 / (1.0 / prior_var + 1.0 / obs_var)
    assert out.cov[0, 0] == pytest.approx(expected, rel=1e-6)
    assert out.cov[1, 1] == pytest.approx(prior_var, rel=1e-6)
    assert out.mean[0] == pytest.approx(
        (2.0 / prior_var + 1.9 / obs_var) / (1.0 / prior_var + 1.0 / obs_var), rel=1e-9
    )


def test_correct_matches_grid_bayes_oracle_worked_example():
    amav = Pose(0, 0, 0)
    belief = diag_belief(1.2, 0.0, 0.25, 0.25)
    r_cov = np.diag([0.01, 0.0025])
    obs = Observation(1.0, 0.0)
    out = correct(belief, obs, amav, r_cov)
    # frozen filter output for regression
    assert out.mean[0] == pytest.approx(1.0076923, abs=1e-6)
    assert out.mean[1] == pytest.approx(0.0, abs=1e-12)
    assert uncertainty(out) == pytest.approx(0.0131646, abs=1e-6)

    grid_mean, grid_cov = grid_bayes_posterior(
        belief.mean, belief.cov, amav, obs.r, obs.alpha, r_cov,
        (0.0, 2.0), (-1.0, 1.0), 0.005,
    )
    assert np.linalg.norm(out.mean - grid_mean) <= 0.02
    grid_trace = grid_cov[0, 0] + grid_cov[1, 1]
    assert abs(uncertainty(out) - grid_trace) <= 0.10 * grid_trace


def test_correct_wraps_bearing_innovation():
    amav = Pose(0, 0, math.pi - 0.05)
    target = (-1.0, -0.05)  # bearing near +pi from the anchor heading
    belief = Belief(target, np.diag([0.04, 0.04]))
    ideal_r = math.hypot(*target)
    ideal_a = math.atan2(target[1], target[0]) - amav.phi
    # push the reading just past the wrap point
    obs = Observation(ideal_r, ideal_a + 2 * math.pi + 0.01)
    out = correct(belief, obs, amav, np.diag([0.01, 0.01]))
    assert np.linalg.norm(out.mean - belief.mean) < 0.5  # no wrap blow-up


def test_correct_raises_on_singular_innovation_covariance():
    amav = Pose(0, 0, 0)
    belief = Belief((1.0, 0.0), np.zeros((2, 2)))
    with pytest.raises(EstimationError):
        correct(belief, Observation(1.0, 0.0), amav, np.zeros((2, 2)))


def test_initial_belief_tiny_isotropic_cov():
    belief = initial_belief((2.0, 3.0))
    assert np.allclose(belief.mean, [2.0, 3.0])
    assert np.allclose(belief.cov, np.diag([1e-4, 1e-4]))


@settings(max_examples=150)
@given(
    st.floats(0.3, 3.0),
    st.floats(-math.pi, math.pi),
    st.floats(0.005, 0.09),
    st.floats(0.005, 0.09),
    st.floats(-0.4, 0.4),
    st.floats(-0.15, 0.15),
    st.floats(-0.15, 0.15),
)
def test_correct_preserves_symmetry_and_psd(dist, direction, vx, vy, cross_frac, nu_r, nu_a):
    amav = Pose(0, 0, 0)
    mean = (dist * math.cos(direction), dist * math.sin(direction))
    cov = np.array([[vx, cross_frac * math.sqrt(vx * vy)],
                    [cross_frac * math.sqrt(vx * vy), vy]])
    belief = Belief(mean, cov)
    obs = Observation(max(dist + nu_r, 1e-6), direction + nu_a)
    out = correct(belief, obs, amav, np.diag([0.01, 0.0025]))
    assert np.allclose(out.cov, out.cov.T)
    assert min(np.linalg.eigvalsh(out.cov)) >= -1e-10
    # information gain: full-rank observation cannot inflate the trace
    assert uncertainty(out) <= uncertainty(belief) + 1e-12


@given(st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_predict_never_shrinks_trace(q1, q2):
    belief = diag_belief(0, 0, 0.02, 0.05)
    out = predict(belief, (0.1, -0.2), np.diag([q1, q2]))
    assert uncertainty(out) >= uncertainty(belief)

"""Independent reference computations the tests check the library against."""

from __future__ import annotations

import itertools
import math

import numpy as np

from mavloc import (
    expected_correction,
    predict,
    predict_observation,
    step_amav,
    wrap_angle,
)
from mavloc.estimation import motion_process_noise


def wrap_array(theta: np.ndarray) -> np.ndarray:
    return np.pi - (np.pi - theta) % (2.0 * np.pi)


def grid_bayes_posterior(
    prior_mean,
    prior_cov,
    amav_pose,
    obs_r: float,
    obs_alpha: float,
    r_cov,
    x_range,
    y_range,
    pitch: float,
):
    """Dense-grid Bayes update for one range/bearing observation.

    Evaluates prior * likelihood on a regular grid and returns the moments
    of the normalized posterior.  Entirely independent of the Kalman code
    path: no Jacobians, no linearization.
    """
    xs = np.arange(x_range[0], x_range[1] + 0.5 * pitch, pitch)
    ys = np.arange(y_range[0], y_range[1] + 0.5 * pitch, pitch)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")

    dmx = gx - prior_mean[0]
    dmy = gy - prior_mean[1]
    p_inv = np.linalg.inv(np.asarray(prior_cov, dtype=float))
    log_prior = -0.5 * (
        p_inv[0, 0] * dmx * dmx + 2.0 * p_inv[0, 1] * dmx * dmy + p_inv[1, 1] * dmy * dmy
    )

    dx = gx - amav_pose.x1
    dy = gy - amav_pose.x2
    r = np.hypot(dx, dy)
    r = np.maximum(r, 1e-12)
    alpha = wrap_array(np.arctan2(dy, dx) - amav_pose.phi)
    r_cov = np.asarray(r_cov, dtype=float)
    log_lik = -0.5 * (
        (obs_r - r) ** 2 / r_cov[0, 0]
        + wrap_array(obs_alpha - alpha) ** 2 / r_cov[1, 1]
    )

    log_post = log_prior + log_lik
    weights = np.exp(log_post - log_post.max())
    weights /= weights.sum()
    mean = np.array([(weights * gx).sum(), (weights * gy).sum()])
    cx = gx - mean[0]
    cy = gy - mean[1]
    cov = np.array(
        [
            [(weights * cx * cx).sum(), (weights * cx * cy).sum()],
            [(weights * cx * cy).sum(), (weights * cy * cy).sum()],
        ]
    )
    return mean, cov


def rollout_cost(
    start_pose,
    commands,
    beliefs,
    bmav_cmds,
    fov,
    motion_noise,
    range_noise,
    bearing_noise,
    dt: float = 1.0,
    accumulate: bool = False,
) -> float:
    """Score one anchor command sequence with the public belief-rollout API."""
    pose = start_pose
    current = list(beliefs)
    qs = [motion_process_noise(cmd, motion_noise) for cmd in bmav_cmds]
    total = 0.0
    cost = 0.0
    for command in commands:
        pose = step_amav(pose, command, dt)
        current = [predict(b, v, q, dt) for b, v, q in zip(current, bmav_cmds, qs)]
        current = [
            expected_correction(b, pose, fov, range_noise, bearing_noise)
            for b in current
        ]
        cost = sum(float(b.cov[0, 0] + b.cov[1, 1]) for b in current)
        total += cost
    return total if accumulate else cost


def brute_force_plan(
    start_pose,
    beliefs,
    bmav_cmds,
    primitives,
    delta,
    fov,
    motion_noise,
    range_noise,
    bearing_noise,
    dt: float = 1.0,
    accumulate: bool = False,
):
    """Exhaustive enumeration of every command sequence; first minimum wins."""
    best_cost = math.inf
    best_seq = None
    for seq in itertools.product(primitives, repeat=delta):
        cost = rollout_cost(
            start_pose, seq, beliefs, bmav_cmds, fov,
            motion_noise, range_noise, bearing_noise, dt, accumulate,
        )
        if cost < best_cost:
            best_cost = cost
            best_seq = seq
    return best_seq, best_cost


def fd_observation_jacobian(amav_pose, position, eps: float = 1e-6) -> np.ndarray:
    """Central finite differences of the range/bearing map, bearing wrapped."""
    jac = np.zeros((2, 2))
    position = np.asarray(position, dtype=float)
    for k in range(2):
        bump = np.zeros(2)
        bump[k] = eps
        hi = predict_observation(amav_pose, position + bump)
        lo = predict_observation(amav_pose, position - bump)
        jac[0, k] = (hi.r - lo.r) / (2.0 * eps)
        jac[1, k] = wrap_angle(hi.alpha - lo.alpha) / (2.0 * eps)
    return jac


def nearest_anchor(amav_positions, point) -> int:
    """Plain-loop nearest anchor with lowest-index tie-break."""
    best, best_d2 = 0, math.inf
    for j, (ax, ay) in enumerate(amav_positions):
        d2 = (point[0] - ax) ** 2 + (point[1] - ay) ** 2
        if d2 < best_d2:
            best, best_d2 = j, d2
    return best

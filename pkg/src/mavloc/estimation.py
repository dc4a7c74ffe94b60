"""Per-BMAV Gaussian belief: linear prediction, linearized range/bearing correction.

Each BMAV's position estimate is a 2-D Gaussian (mean, covariance).  The
prediction step integrates the measured velocity and inflates the covariance
with the motion-noise model; the correction step applies a standard
linearized Kalman update around the prior mean using a range/bearing
observation from an anchor.  The trace of the covariance is the uncertainty
indicator used to decide which BMAVs most need anchor attention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sensing import Observation, jacobian_h, predict_observation
from .world import NoiseModel, Pose, wrap_angle

PSD_TOL = -1e-10


class EstimationError(RuntimeError):
    """Raised when a belief update becomes numerically invalid."""


@dataclass(frozen=True)
class Belief:
    """Gaussian position estimate: mean (2,) and covariance (2, 2)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", np.array(self.mean, dtype=float))
        object.__setattr__(self, "cov", np.array(self.cov, dtype=float))


def initial_belief(position, var: float = 1e-4) -> Belief:
    """Belief at launch: the starting position is known up to a tiny variance."""
    return Belief(position, np.diag([var, var]))


def uncertainty(b: Belief) -> float:
    """Trace of the belief covariance, the scalar uncertainty indicator."""
    return float(b.cov[0, 0] + b.cov[1, 1])


def rank_by_uncertainty(beliefs) -> list[int]:
    """Indices sorted by descending uncertainty; ties broken by ascending index."""
    return sorted(range(len(beliefs)), key=lambda i: (-uncertainty(beliefs[i]), i))


def motion_process_noise(v_cmd, noise: NoiseModel) -> np.ndarray:
    """Per-step process noise covariance at the current commanded velocity."""
    s1 = noise.sigma_for(float(v_cmd[0]))
    s2 = noise.sigma_for(float(v_cmd[1]))
    return np.diag([s1 * s1, s2 * s2])


def measurement_noise_cov(
    r_pred: float, alpha_pred: float, noise_r: NoiseModel, noise_a: NoiseModel
) -> np.ndarray:
    """Observation noise covariance built at the predicted range and bearing.

    Using the prediction (not the noisy reading) keeps the covariance at the
    same linearization point as the Jacobian; the model floors keep it
    invertible when the predicted values are near zero.
    """
    sr = noise_r.sigma_for(r_pred)
    sa = noise_a.sigma_for(alpha_pred)
    return np.diag([sr * sr, sa * sa])


def predict(b: Belief, v_meas, q: np.ndarray, dt: float = 1.0) -> Belief:
    """Propagate the belief through one step of measured velocity.

    The state model is linear in the position, so the mean shifts by
    dt * v_meas and the covariance inflates by dt^2 * q.
    """
    mean = b.mean + dt * np.asarray(v_meas, dtype=float)
    cov = b.cov + (dt * dt) * q
    return Belief(mean, cov)


def correct(b: Belief, obs: Observation, amav: Pose, r_cov: np.ndarray) -> Belief:
    """Fuse one range/bearing observation into the belief.

    Linearized Kalman update around the prior mean: the innovation bearing
    is wrapped, the gain uses the observation Jacobian at the prior mean,
    and the posterior covariance is symmetrized.  The Bayes normalizer is
    implicit in the Gaussian algebra.
    """
    predicted = predict_observation(amav, b.mean)
    jac = jacobian_h(amav, b.mean)
    innovation = np.array(
        [obs.r - predicted.r, wrap_angle(obs.alpha - predicted.alpha)]
    )
    s = jac @ b.cov @ jac.T + r_cov
    det = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
    if not det > 1e-18:
        raise EstimationError("innovation covariance is not invertible")
    s_inv = np.array([[s[1, 1], -s[0, 1]], [-s[1, 0], s[0, 0]]]) / det
    gain = b.cov @ jac.T @ s_inv
    mean = b.mean + gain @ innovation
    cov = (np.eye(2) - gain @ jac) @ b.cov
    cov = 0.5 * (cov + cov.T)
    if min(np.linalg.eigvalsh(cov)) < PSD_TOL:
        raise EstimationError("posterior covariance lost positive semidefiniteness")
    return Belief(mean, cov)

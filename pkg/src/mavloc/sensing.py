"""Anchor field-of-view test, noisy range/bearing observations, and their Jacobian."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .world import NoiseModel, Pose, sample_noise, wrap_angle

RANGE_EPS = 1e-9


@dataclass(frozen=True)
class FovParams:
    """Sensing cone of an anchor: full aperture angle and maximum range."""

    angle: float
    r_max: float

    def __post_init__(self) -> None:
        if not (0.0 < self.angle <= 2.0 * math.pi):
            raise ValueError("fov angle must be in (0, 2*pi]")
        if self.r_max <= 0.0:
            raise ValueError("fov r_max must be positive")


@dataclass(frozen=True)
class Observation:
    """One range/bearing reading of a BMAV, relative to the observing anchor."""

    r: float
    alpha: float
    amav_id: int = -1
    bmav_id: int = -1
    t: int = -1


def _in_cone_cs(
    dx: float, dy: float, cphi: float, sphi: float, cos_half: float, r_max2: float
) -> bool:
    # Open boundary on both range and bearing. |bearing| < angle/2 is tested
    # as cos(bearing) > cos(angle/2) to avoid an atan2 per candidate.
    r2 = dx * dx + dy * dy
    if not (0.0 < r2 < r_max2):
        return False
    return dx * cphi + dy * sphi > math.sqrt(r2) * cos_half


def fov_contains(pose: Pose, fov: FovParams, point) -> bool:
    """True iff the point lies strictly inside the anchor's sensing cone."""
    return _in_cone_cs(
        point[0] - pose.x1,
        point[1] - pose.x2,
        math.cos(pose.phi),
        math.sin(pose.phi),
        math.cos(0.5 * fov.angle),
        fov.r_max * fov.r_max,
    )


def predict_observation(
    amav: Pose, bmav_pos, amav_id: int = -1, bmav_id: int = -1, t: int = -1
) -> Observation:
    """Noiseless range/bearing of a position as seen from an anchor pose."""
    dx = bmav_pos[0] - amav.x1
    dy = bmav_pos[1] - amav.x2
    r = math.hypot(dx, dy)
    if r < RANGE_EPS:
        raise ValueError("bearing undefined: positions coincide")
    alpha = wrap_angle(math.atan2(dy, dx) - amav.phi)
    return Observation(r, alpha, amav_id, bmav_id, t)


def observe(
    amav: Pose,
    bmav_truth,
    fov: FovParams,
    noise_r: NoiseModel,
    noise_a: NoiseModel,
    rng: np.random.Generator,
    amav_id: int = -1,
    bmav_id: int = -1,
    t: int = -1,
) -> Observation | None:
    """Noisy observation of a true BMAV position, or None if outside the FoV."""
    if not fov_contains(amav, fov, bmav_truth):
        return None
    ideal = predict_observation(amav, bmav_truth, amav_id, bmav_id, t)
    r = ideal.r + sample_noise(ideal.r, noise_r, rng)
    alpha = wrap_angle(ideal.alpha + sample_noise(ideal.alpha, noise_a, rng))
    return Observation(max(r, RANGE_EPS), alpha, amav_id, bmav_id, t)


def jacobian_h(amav: Pose, bmav_est) -> np.ndarray:
    """Gradient of the range/bearing map with respect to the observed position.

    Evaluated at the estimate; row one is the range gradient, row two the
    bearing gradient.  Raises when the estimate sits on the anchor, where
    the linearization is singular.
    """
    dx = bmav_est[0] - amav.x1
    dy = bmav_est[1] - amav.x2
    r2 = dx * dx + dy * dy
    r = math.sqrt(r2)
    if r < RANGE_EPS:
        raise ValueError("singular linearization: range below epsilon")
    return np.array([[dx / r, dy / r], [-dy / r2, dx / r2]])

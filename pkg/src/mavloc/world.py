"""Ground-truth vehicle dynamics, arena bounds, and value-scaled noise models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Normalize an angle to the half-open interval (-pi, pi]."""
    return math.pi - (math.pi - theta) % TWO_PI


@dataclass(frozen=True)
class Arena:
    """Rectangular operating area; all vehicles share a common altitude."""

    length: float
    width: float

    def __post_init__(self) -> None:
        if not (self.length > 0.0 and self.width > 0.0):
            raise ValueError("arena dimensions must be positive")

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.length and 0.0 <= y <= self.width

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5 * self.length, 0.5 * self.width])


@dataclass(frozen=True)
class Pose:
    """Planar pose of an anchor vehicle; heading is normalized to (-pi, pi]."""

    x1: float
    x2: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1", float(self.x1))
        object.__setattr__(self, "x2", float(self.x2))
        object.__setattr__(self, "phi", wrap_angle(float(self.phi)))

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x1, self.x2])


@dataclass(frozen=True)
class MotionPrimitive:
    """One discrete control option: translational and rotational velocity."""

    u: float
    omega: float


HOVER = MotionPrimitive(0.0, 0.0)


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean Gaussian noise whose stddev scales with the measured value.

    sigma = max(sigma_fraction * |value|, floor).  A positive floor keeps
    covariances built from the model nonsingular near zero values.
    """

    sigma_fraction: float
    floor: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma_fraction < 0.0 or self.floor < 0.0:
            raise ValueError("noise parameters must be nonnegative")

    def sigma_for(self, value: float) -> float:
        return max(self.sigma_fraction * abs(value), self.floor)


@dataclass
class BmavTruth:
    """True state of a dead-reckoning vehicle: position and commanded velocity."""

    y: np.ndarray
    v_cmd: np.ndarray

    def __post_init__(self) -> None:
        self.y = np.array(self.y, dtype=float)
        self.v_cmd = np.array(self.v_cmd, dtype=float)


def step_amav(pose: Pose, cmd: MotionPrimitive, dt: float = 1.0) -> Pose:
    """Advance an anchor pose one step; translation uses the pre-step heading.

    Anchor motion is deterministic: these vehicles localize themselves
    accurately, so no noise is injected here.
    """
    return Pose(
        pose.x1 + cmd.u * math.cos(pose.phi) * dt,
        pose.x2 + cmd.u * math.sin(pose.phi) * dt,
        pose.phi + cmd.omega * dt,
    )


def sample_noise(value: float, noise: NoiseModel, rng: np.random.Generator) -> float:
    """Draw one Gaussian sample with stddev scaled to the given value."""
    return float(rng.normal(0.0, noise.sigma_for(value)))


def step_bmav_truth(
    state: BmavTruth,
    noise: NoiseModel,
    rng: np.random.Generator,
    dt: float = 1.0,
    arena: Arena | None = None,
    act_noise: np.ndarray | None = None,
) -> tuple[BmavTruth, np.ndarray]:
    """Advance a BMAV one step; returns (new truth, measured velocity).

    The commanded velocity is perturbed by a per-axis actuation draw; the
    velocity measurement is the realized velocity plus an independent
    sensing draw from the same model, so an estimator integrating the
    measurements drifts away from the truth at the model's noise rate.
    ``act_noise`` overrides the actuation draw when the caller holds one
    draw fixed across a whole command interval.

    With an arena, positions are clamped to its bounds and the velocity
    component pointing into a wall is zeroed.
    """
    if act_noise is None:
        act_noise = np.array(
            [
                sample_noise(state.v_cmd[0], noise, rng),
                sample_noise(state.v_cmd[1], noise, rng),
            ]
        )
    meas_noise = np.array(
        [
            sample_noise(state.v_cmd[0], noise, rng),
            sample_noise(state.v_cmd[1], noise, rng),
        ]
    )
    v_real = state.v_cmd + act_noise
    v_meas = v_real + meas_noise
    y = state.y + dt * v_real
    v_cmd = state.v_cmd.copy()
    if arena is not None:
        bounds = (arena.length, arena.width)
        for axis in range(2):
            clamped = min(max(y[axis], 0.0), bounds[axis])
            if clamped != y[axis]:
                y[axis] = clamped
                v_cmd[axis] = 0.0
    return BmavTruth(y, v_cmd), v_meas

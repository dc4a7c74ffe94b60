"""Potential-field velocity commands steering BMAVs to their destinations.

The destination attracts with a force proportional to distance; walls and
other BMAVs repel within a cutoff radius.  Commands are computed from
estimated positions, which is what couples localization quality to
navigation success.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .world import Arena

_PARALLEL_TOL = 1e-9


@dataclass(frozen=True)
class NavParams:
    """Gains and radii of the potential field; v_max caps the command speed.

    Commands are recomputed only once per command interval, so the
    attractive gain must satisfy k_att * interval < 2 or the held command
    overshoots the goal every interval and the vehicle limit-cycles around
    it; the default leaves margin for the 5 s interval.
    """

    k_att: float = 0.25
    k_rep: float = 0.01
    rep_radius: float = 0.5
    v_max: float = 0.5
    arrive_radius: float = 0.05

    def __post_init__(self) -> None:
        for name in ("k_att", "k_rep", "rep_radius", "v_max", "arrive_radius"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"navigation parameter {name} must be positive")


def wall_repulsors(pos, arena: Arena, rep_radius: float) -> list[np.ndarray]:
    """Nearest point on each wall that lies within the repulsion radius."""
    x, y = float(pos[0]), float(pos[1])
    repulsors = []
    if x < rep_radius:
        repulsors.append(np.array([0.0, y]))
    if arena.length - x < rep_radius:
        repulsors.append(np.array([arena.length, y]))
    if y < rep_radius:
        repulsors.append(np.array([x, 0.0]))
    if arena.width - y < rep_radius:
        repulsors.append(np.array([x, arena.width]))
    return repulsors


def plan_bmav_cmd(
    est_pos, dest, neighbor_positions, arena: Arena, params: NavParams
) -> np.ndarray:
    """Velocity command from the potential field, clamped to v_max.

    Returns zero once the estimated position is within the arrival radius.
    An obstacle sitting exactly on the goal line would produce a repulsion
    exactly opposing the attraction and stall the vehicle there; that
    degenerate case gets the repulsion rotated a quarter turn so the
    command deflects off the line deterministically.
    """
    est = np.asarray(est_pos, dtype=float)
    to_dest = np.asarray(dest, dtype=float) - est
    dist = float(np.hypot(to_dest[0], to_dest[1]))
    if dist < params.arrive_radius:
        return np.zeros(2)
    cmd = params.k_att * to_dest
    obstacles = [np.asarray(p, dtype=float) for p in neighbor_positions]
    obstacles.extend(wall_repulsors(est, arena, params.rep_radius))
    for obstacle in obstacles:
        away = est - obstacle
        d = float(np.hypot(away[0], away[1]))
        if d >= params.rep_radius or d < 1e-12:
            continue
        direction = away / d
        cross = away[0] * to_dest[1] - away[1] * to_dest[0]
        head_on = abs(cross) <= _PARALLEL_TOL * d * dist and np.dot(away, to_dest) < 0.0
        if head_on:
            direction = np.array([-direction[1], direction[0]])
        cmd = cmd + params.k_rep * (1.0 / d - 1.0 / params.rep_radius) / (d * d) * direction
    speed = float(np.hypot(cmd[0], cmd[1]))
    if speed > params.v_max:
        cmd = cmd * (params.v_max / speed)
    return cmd

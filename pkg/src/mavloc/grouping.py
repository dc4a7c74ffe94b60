"""Proximity grouping: assign each BMAV to its nearest anchor for one command interval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GroupAssignment:
    """Map from anchor index to the set of BMAV indices it serves for one interval."""

    groups: dict[int, set[int]]
    epoch_start: int = 0
    duration: int = 1

    def serving_amav(self, bmav_id: int) -> int:
        """Lowest-indexed anchor whose group contains the BMAV."""
        for amav_id in sorted(self.groups):
            if bmav_id in self.groups[amav_id]:
                return amav_id
        raise KeyError(f"bmav {bmav_id} is not in any group")


def region_boundary_check(amav_positions, point) -> int:
    """Index of the nearest anchor, i.e. whose proximity cell contains the point.

    The cells are bounded by perpendicular bisectors of anchor pairs, so
    membership reduces to a nearest-neighbor test.  Ties go to the lowest
    anchor index.
    """
    positions = np.asarray(amav_positions, dtype=float)
    if positions.size == 0:
        raise ValueError("at least one anchor position is required")
    deltas = positions - np.asarray(point, dtype=float)
    return int(np.argmin(np.einsum("ij,ij->i", deltas, deltas)))


def assign_groups(
    amav_positions, bmav_positions, epoch_start: int = 0, duration: int = 1
) -> GroupAssignment:
    """Partition BMAVs into per-anchor groups by nearest-anchor membership.

    An anchor whose cell holds no BMAVs is assigned the whole fleet instead,
    so every anchor always has someone to serve; those fallback groups may
    overlap the regular ones.
    """
    positions = np.asarray(amav_positions, dtype=float)
    if positions.size == 0:
        raise ValueError("at least one anchor position is required")
    n_amavs = len(positions)
    groups: dict[int, set[int]] = {j: set() for j in range(n_amavs)}
    for i, point in enumerate(np.asarray(bmav_positions, dtype=float).reshape(-1, 2)):
        groups[region_boundary_check(positions, point)].add(i)
    everyone = set(range(len(np.asarray(bmav_positions).reshape(-1, 2))))
    for j in range(n_amavs):
        if not groups[j] and everyone:
            groups[j] = set(everyone)
    return GroupAssignment(groups, epoch_start, duration)

"""Anchor motion planning: lookahead tree search minimizing group covariance trace.

Each anchor plans a fixed-depth sequence of motion primitives over its
assigned group.  During the lookahead the group beliefs roll forward with
the commands the BMAVs were just issued; whenever a predicted mean falls
inside the candidate pose's sensing cone, a covariance-only correction is
applied (future measurement values are unknown, but covariance evolution
does not depend on them in the linearized filter).  The plan reaching the
lowest summed trace at the final depth wins; ties go to the first plan in
primitive enumeration order.

Predicted means are shared across the whole tree level (they do not depend
on the anchor's path) and predicted covariances are shared between siblings
until a correction forces a copy, which keeps full-width search cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimation import Belief
from .grouping import GroupAssignment
from .sensing import FovParams, fov_contains, _in_cone_cs
from .world import HOVER, Arena, MotionPrimitive, NoiseModel, Pose, step_amav, wrap_angle

_DET_EPS = 1e-18


@dataclass(slots=True)
class SearchNode:
    """One reachable anchor pose with the group uncertainty accumulated so far.

    Means are shared per tree level since prediction does not depend on the
    anchor's path; only the covariance triples (a, b, c) vary per node.
    """

    pose: Pose
    means: tuple
    covs: tuple
    depth: int
    incoming_cmd: MotionPrimitive | None
    parent: "SearchNode | None"
    cost: float

    @property
    def beliefs(self) -> list[Belief]:
        return [
            Belief(np.array(m), np.array([[a, b], [b, c]]))
            for m, (a, b, c) in zip(self.means, self.covs)
        ]


@dataclass(frozen=True)
class Plan:
    """A depth-long command sequence and the trace cost predicted at its leaf."""

    commands: tuple[MotionPrimitive, ...]
    predicted_cost: float
    nodes_expanded: int = 0


def _cov_correct(
    a: float, b: float, c: float,
    dx: float, dy: float, r2: float, r: float,
    sr2: float, sa2: float,
) -> tuple[float, float, float] | None:
    """Covariance part of the linearized range/bearing update, in scalar form.

    Same algebra as estimation.correct restricted to the covariance; the
    bearing row of the Jacobian is (-dy, dx) / r^2.  Returns None when the
    innovation covariance is numerically singular (instead of failing, a
    lookahead simply forgoes that correction).
    """
    h11 = dx / r
    h12 = dy / r
    h21 = -dy / r2
    h22 = dx / r2
    p11 = a * h11 + b * h12
    p12 = a * h21 + b * h22
    p21 = b * h11 + c * h12
    p22 = b * h21 + c * h22
    s11 = h11 * p11 + h12 * p21 + sr2
    s12 = h11 * p12 + h12 * p22
    s22 = h21 * p12 + h22 * p22 + sa2
    det = s11 * s22 - s12 * s12
    if not det > _DET_EPS:
        return None
    i11 = s22 / det
    i12 = -s12 / det
    i22 = s11 / det
    k11 = p11 * i11 + p12 * i12
    k12 = p11 * i12 + p12 * i22
    k21 = p21 * i11 + p22 * i12
    k22 = p21 * i12 + p22 * i22
    m11 = 1.0 - (k11 * h11 + k12 * h21)
    m12 = -(k11 * h12 + k12 * h22)
    m21 = -(k21 * h11 + k22 * h21)
    m22 = 1.0 - (k21 * h12 + k22 * h22)
    a2 = m11 * a + m12 * b
    b2 = 0.5 * ((m11 * b + m12 * c) + (m21 * a + m22 * b))
    c2 = m21 * b + m22 * c
    return a2, b2, c2


def expected_correction(
    belief: Belief,
    amav_pose: Pose,
    fov: FovParams,
    noise_r: NoiseModel,
    noise_a: NoiseModel,
) -> Belief:
    """Planning-time correction: covariance shrinks, mean stays put.

    Applied only when the belief mean lies inside the sensing cone; the
    measurement noise covariance is built at the predicted range/bearing.
    """
    mean = belief.mean
    if not fov_contains(amav_pose, fov, mean):
        return belief
    dx = float(mean[0]) - amav_pose.x1
    dy = float(mean[1]) - amav_pose.x2
    r2 = dx * dx + dy * dy
    r = math.sqrt(r2)
    alpha = wrap_angle(math.atan2(dy, dx) - amav_pose.phi)
    sr = noise_r.sigma_for(r)
    sa = noise_a.sigma_for(alpha)
    cov = belief.cov
    result = _cov_correct(
        float(cov[0, 0]), float(cov[0, 1]), float(cov[1, 1]),
        dx, dy, r2, r, sr * sr, sa * sa,
    )
    if result is None:
        return belief
    a, b, c = result
    return Belief(mean.copy(), np.array([[a, b], [b, c]]))


def _prepare(group_beliefs, bmav_cmds, motion_noise, delta, dt):
    """Per-belief inflation terms and the shared predicted means per level."""
    n = len(group_beliefs)
    if len(bmav_cmds) != n:
        raise ValueError("one velocity command per group member is required")
    inflation = []
    for cmd in bmav_cmds:
        s1 = motion_noise.sigma_for(float(cmd[0]))
        s2 = motion_noise.sigma_for(float(cmd[1]))
        inflation.append(((dt * dt) * (s1 * s1), (dt * dt) * (s2 * s2)))
    means_by_level = []
    current = [(float(b.mean[0]), float(b.mean[1])) for b in group_beliefs]
    for _ in range(delta):
        current = [
            (mx + dt * float(cmd[0]), my + dt * float(cmd[1]))
            for (mx, my), cmd in zip(current, bmav_cmds)
        ]
        means_by_level.append(tuple(current))
    covs0 = tuple(
        (float(b.cov[0, 0]), float(b.cov[0, 1]), float(b.cov[1, 1]))
        for b in group_beliefs
    )
    return inflation, means_by_level, covs0


def _child_state(
    pose: Pose,
    prim: MotionPrimitive,
    pred_covs: tuple,
    base_trace: float,
    means_k: tuple,
    fov: FovParams,
    range_noise: NoiseModel,
    bearing_noise: NoiseModel,
    dt: float,
    arena: Arena | None,
):
    """Apply one primitive and the expected corrections it enables.

    Returns (pose, covs, trace_sum) or None when the move leaves the arena.
    """
    child_pose = step_amav(pose, prim, dt)
    if arena is not None and not arena.contains(child_pose.x1, child_pose.x2):
        return None
    cphi = math.cos(child_pose.phi)
    sphi = math.sin(child_pose.phi)
    cos_half = math.cos(0.5 * fov.angle)
    r_max2 = fov.r_max * fov.r_max
    covs = pred_covs
    trace = base_trace
    corrected = None
    for i, (mx, my) in enumerate(means_k):
        dx = mx - child_pose.x1
        dy = my - child_pose.x2
        if not _in_cone_cs(dx, dy, cphi, sphi, cos_half, r_max2):
            continue
        r2 = dx * dx + dy * dy
        r = math.sqrt(r2)
        alpha = wrap_angle(math.atan2(dy, dx) - child_pose.phi)
        sr = range_noise.sigma_for(r)
        sa = bearing_noise.sigma_for(alpha)
        current = covs[i] if corrected is None else corrected[i]
        result = _cov_correct(*current, dx, dy, r2, r, sr * sr, sa * sa)
        if result is None:
            continue
        if corrected is None:
            corrected = list(covs)
        trace += (result[0] + result[2]) - (current[0] + current[2])
        corrected[i] = result
    if corrected is not None:
        covs = tuple(corrected)
    return child_pose, covs, trace


def plan_amav(
    start: Pose,
    group_beliefs,
    bmav_cmds,
    primitives,
    delta: int,
    fov: FovParams,
    motion_noise: NoiseModel,
    range_noise: NoiseModel,
    bearing_noise: NoiseModel,
    *,
    dt: float = 1.0,
    arena: Arena | None = None,
    beam_width: int | None = None,
    accumulate_cost: bool = False,
) -> Plan:
    """Full lookahead search over command sequences for one anchor.

    Expands the tree level by level to the full depth and backtracks from
    the cheapest leaf.  With beam_width set, each level keeps only the best
    nodes (stable order, so ties still resolve by enumeration order); by
    default the expansion is exhaustive.  accumulate_cost switches the
    objective from the leaf trace to the trace summed over every level.
    """
    if delta < 1:
        raise ValueError("lookahead depth must be at least 1")
    primitives = tuple(primitives)
    if not primitives:
        raise ValueError("primitive set must not be empty")
    if not group_beliefs:
        raise ValueError("group must not be empty")
    if beam_width is not None and beam_width < 1:
        raise ValueError("beam width must be positive when given")

    inflation, means_by_level, covs0 = _prepare(
        group_beliefs, bmav_cmds, motion_noise, delta, dt
    )
    root_means = tuple(
        (float(b.mean[0]), float(b.mean[1])) for b in group_beliefs
    )
    root = SearchNode(
        start, root_means, covs0, 0, None, None,
        sum(a + c for a, _, c in covs0),
    )
    if not accumulate_cost:
        root.cost = 0.0
    nodes_created = 1
    level = [root]
    for k in range(1, delta + 1):
        means_k = means_by_level[k - 1]
        children: list[SearchNode] = []
        for parent in level:
            pred_covs = tuple(
                (a + q1, b, c + q2)
                for (a, b, c), (q1, q2) in zip(parent.covs, inflation)
            )
            base_trace = sum(a + c for a, _, c in pred_covs)
            produced = 0
            for prim in primitives:
                state = _child_state(
                    parent.pose, prim, pred_covs, base_trace, means_k,
                    fov, range_noise, bearing_noise, dt, arena,
                )
                if state is None:
                    continue
                pose, covs, trace = state
                cost = parent.cost + trace if accumulate_cost else trace
                children.append(
                    SearchNode(pose, means_k, covs, k, prim, parent, cost)
                )
                produced += 1
            if produced == 0:
                # Every primitive exits the arena: hold position instead.
                pose, covs, trace = _child_state(
                    parent.pose, HOVER, pred_covs, base_trace, means_k,
                    fov, range_noise, bearing_noise, dt, None,
                )
                cost = parent.cost + trace if accumulate_cost else trace
                children.append(
                    SearchNode(pose, means_k, covs, k, HOVER, parent, cost)
                )
        nodes_created += len(children)
        if beam_width is not None and len(children) > beam_width:
            children.sort(key=lambda node: node.cost)
            children = children[:beam_width]
        level = children

    best = level[0]
    for node in level[1:]:
        if node.cost < best.cost:
            best = node
    commands: list[MotionPrimitive] = []
    node = best
    while node.parent is not None:
        commands.append(node.incoming_cmd)
        node = node.parent
    commands.reverse()
    return Plan(tuple(commands), best.cost, nodes_created)


def plan_amav_greedy(
    start: Pose,
    group_beliefs,
    bmav_cmds,
    primitives,
    delta: int,
    fov: FovParams,
    motion_noise: NoiseModel,
    range_noise: NoiseModel,
    bearing_noise: NoiseModel,
    *,
    dt: float = 1.0,
    arena: Arena | None = None,
    accumulate_cost: bool = False,
) -> Plan:
    """One-step-at-a-time baseline planner: argmin over single primitives.

    Builds a depth-long command sequence by committing to the best immediate
    child at each step, without lookahead beyond it.
    """
    if delta < 1:
        raise ValueError("lookahead depth must be at least 1")
    primitives = tuple(primitives)
    if not primitives:
        raise ValueError("primitive set must not be empty")
    if not group_beliefs:
        raise ValueError("group must not be empty")

    inflation, means_by_level, covs = _prepare(
        group_beliefs, bmav_cmds, motion_noise, delta, dt
    )
    pose = start
    nodes_created = 1
    accumulated = 0.0
    commands: list[MotionPrimitive] = []
    trace = math.inf
    for k in range(1, delta + 1):
        means_k = means_by_level[k - 1]
        pred_covs = tuple(
            (a + q1, b, c + q2) for (a, b, c), (q1, q2) in zip(covs, inflation)
        )
        base_trace = sum(a + c for a, _, c in pred_covs)
        best = None
        for prim in primitives:
            state = _child_state(
                pose, prim, pred_covs, base_trace, means_k,
                fov, range_noise, bearing_noise, dt, arena,
            )
            if state is None:
                continue
            nodes_created += 1
            if best is None or state[2] < best[1][2]:
                best = (prim, state)
        if best is None:
            state = _child_state(
                pose, HOVER, pred_covs, base_trace, means_k,
                fov, range_noise, bearing_noise, dt, None,
            )
            nodes_created += 1
            best = (HOVER, state)
        prim, (pose, covs, trace) = best
        commands.append(prim)
        accumulated += trace
    cost = accumulated if accumulate_cost else trace
    return Plan(tuple(commands), cost, nodes_created)


def plan_all(
    assignment: GroupAssignment,
    amav_poses,
    beliefs,
    bmav_cmds,
    primitives,
    delta: int,
    fov: FovParams,
    motion_noise: NoiseModel,
    range_noise: NoiseModel,
    bearing_noise: NoiseModel,
    *,
    dt: float = 1.0,
    arena: Arena | None = None,
    beam_width: int | None = None,
    accumulate_cost: bool = False,
    myopic: bool = False,
) -> dict[int, Plan]:
    """Independent plan per anchor over its own group.

    Anchors do not model each other, so the per-anchor searches are fully
    decoupled and the result does not depend on evaluation order.
    """
    plans: dict[int, Plan] = {}
    for amav_id in sorted(assignment.groups):
        members = sorted(assignment.groups[amav_id])
        if not members:
            plans[amav_id] = Plan((HOVER,) * delta, 0.0, 1)
            continue
        group = [beliefs[i] for i in members]
        cmds = [bmav_cmds[i] for i in members]
        if myopic:
            plans[amav_id] = plan_amav_greedy(
                amav_poses[amav_id], group, cmds, primitives, delta, fov,
                motion_noise, range_noise, bearing_noise,
                dt=dt, arena=arena, accumulate_cost=accumulate_cost,
            )
        else:
            plans[amav_id] = plan_amav(
                amav_poses[amav_id], group, cmds, primitives, delta, fov,
                motion_noise, range_noise, bearing_noise,
                dt=dt, arena=arena, beam_width=beam_width,
                accumulate_cost=accumulate_cost,
            )
    return plans

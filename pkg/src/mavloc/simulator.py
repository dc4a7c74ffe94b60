"""Closed-loop engine: grouping, navigation, planning, sensing, and estimation per step.

The engine plays the central coordinator: it knows the belief state of every
BMAV, issues their velocity commands, and moves the anchors.  Ground truth
is advanced separately and is only ever exposed to the estimator through
noisy observations.

Every run owns an independent random stream per entity (spawned from the
scenario seed), so truth noise realizations are shared between strategies
run on the same seed; strategy comparisons are paired rather than drowned
in realization noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import ScenarioConfig
from .estimation import (
    Belief,
    correct,
    initial_belief,
    measurement_noise_cov,
    motion_process_noise,
    predict,
)
from .grouping import assign_groups
from .navigation import plan_bmav_cmd
from .scheduling import Plan, plan_all
from .sensing import Observation, observe, predict_observation
from .world import BmavTruth, Pose, sample_noise, step_amav, step_bmav_truth


@dataclass(slots=True, eq=False)
class StepRecord:
    """Everything observable about one timestep, recorded after its updates."""

    t: int
    bmav_true: np.ndarray
    bmav_est: np.ndarray
    bmav_cov: np.ndarray
    bmav_cmds: np.ndarray
    amav_poses: tuple[Pose, ...]
    observations: tuple[Observation, ...]
    observed_by: tuple[tuple[int, ...], ...]
    group_of: tuple[int, ...]
    plans: dict[int, Plan] | None


@dataclass(eq=False)
class SimTrace:
    """Complete record of one run: the resolved scenario plus one record per step."""

    config: ScenarioConfig
    strategy: str
    seed: int
    records: list[StepRecord]


def run_scenario(config: ScenarioConfig) -> SimTrace:
    """Run one scenario to its horizon under the configured strategy.

    Per step: at command-interval boundaries the fleet is regrouped, BMAV
    commands are issued from belief means, and anchor plans are rebuilt;
    then anchors advance along their plans, truths advance with noise,
    beliefs run the prediction step on the measured velocities, and every
    in-view observation is fused.  Deterministic given the scenario seed.
    """
    strategy = config.strategy
    arena = config.arena
    fov = config.fov
    nav = config.nav
    dt = config.dt
    delta = config.delta
    n_bmavs = config.bmav_count
    n_amavs = config.amav_count
    per_interval = config.motion_noise_mode == "per_interval"

    seed_seq = np.random.SeedSequence(config.seed)
    children = seed_seq.spawn(n_bmavs + n_amavs)
    motion_rngs = [np.random.default_rng(s) for s in children[:n_bmavs]]
    obs_rngs = [np.random.default_rng(s) for s in children[n_bmavs:]]

    if strategy == "station":
        amav_poses = list(config.station_poses)
    else:
        amav_poses = list(config.amav_starts)
    truths = [BmavTruth(start, (0.0, 0.0)) for start in config.bmav_starts]
    beliefs = [initial_belief(start) for start in config.bmav_starts]
    destinations = [np.asarray(d, dtype=float) for d in config.bmav_destinations]

    plans: dict[int, Plan] | None = None
    group_of: tuple[int, ...] = tuple(0 for _ in range(n_bmavs))
    held_act_noise: list[np.ndarray | None] = [None] * n_bmavs
    records: list[StepRecord] = []

    for t in range(config.horizon):
        epoch_step = t % delta == 0
        if epoch_step:
            assignment = assign_groups(
                [(p.x1, p.x2) for p in amav_poses],
                [b.mean for b in beliefs],
                epoch_start=t,
                duration=delta,
            )
            group_of = tuple(
                min(j for j, members in assignment.groups.items() if i in members)
                for i in range(n_bmavs)
            )
            means = [b.mean for b in beliefs]
            commands = []
            for i in range(n_bmavs):
                neighbors = [means[k] for k in range(n_bmavs) if k != i]
                commands.append(
                    plan_bmav_cmd(means[i], destinations[i], neighbors, arena, nav)
                )
            truths = [
                BmavTruth(truth.y, cmd) for truth, cmd in zip(truths, commands)
            ]
            if per_interval:
                held_act_noise = [
                    np.array(
                        [
                            sample_noise(cmd[0], config.motion_noise, motion_rngs[i]),
                            sample_noise(cmd[1], config.motion_noise, motion_rngs[i]),
                        ]
                    )
                    for i, cmd in enumerate(commands)
                ]
            if strategy in ("nonmyopic", "greedy"):
                plans = plan_all(
                    assignment,
                    amav_poses,
                    beliefs,
                    commands,
                    config.primitives,
                    delta,
                    fov,
                    config.motion_noise,
                    config.range_noise,
                    config.bearing_noise,
                    dt=dt,
                    arena=arena,
                    beam_width=config.beam_width,
                    myopic=strategy == "greedy",
                )

        if plans is not None:
            step_index = t % delta
            amav_poses = [
                step_amav(amav_poses[j], plans[j].commands[step_index], dt)
                for j in range(n_amavs)
            ]

        step_cmds = np.empty((n_bmavs, 2))
        for i in range(n_bmavs):
            cmd_now = truths[i].v_cmd
            step_cmds[i] = cmd_now
            truths[i], v_meas = step_bmav_truth(
                truths[i],
                config.motion_noise,
                motion_rngs[i],
                dt,
                arena,
                act_noise=held_act_noise[i] if per_interval else None,
            )
            q = motion_process_noise(cmd_now, config.motion_noise)
            beliefs[i] = predict(beliefs[i], v_meas, q, dt)

        observations: list[Observation] = []
        observed_by: list[list[int]] = [[] for _ in range(n_bmavs)]
        if strategy != "dead_reckoning":
            for j in range(n_amavs):
                sense_pose = amav_poses[j]
                if config.amav_pose_noise_std > 0.0:
                    sense_pose = Pose(
                        sense_pose.x1
                        + float(obs_rngs[j].normal(0.0, config.amav_pose_noise_std)),
                        sense_pose.x2
                        + float(obs_rngs[j].normal(0.0, config.amav_pose_noise_std)),
                        sense_pose.phi,
                    )
                for i in range(n_bmavs):
                    obs = observe(
                        sense_pose,
                        truths[i].y,
                        fov,
                        config.range_noise,
                        config.bearing_noise,
                        obs_rngs[j],
                        amav_id=j,
                        bmav_id=i,
                        t=t,
                    )
                    if obs is None:
                        continue
                    try:
                        predicted = predict_observation(amav_poses[j], beliefs[i].mean)
                    except ValueError:
                        continue  # prior mean sits on the anchor; skip this reading
                    r_cov = measurement_noise_cov(
                        predicted.r,
                        predicted.alpha,
                        config.range_noise,
                        config.bearing_noise,
                    )
                    beliefs[i] = correct(beliefs[i], obs, amav_poses[j], r_cov)
                    observations.append(obs)
                    observed_by[i].append(j)

        records.append(
            StepRecord(
                t=t,
                bmav_true=np.array([truth.y for truth in truths]),
                bmav_est=np.array([belief.mean for belief in beliefs]),
                bmav_cov=np.array([belief.cov for belief in beliefs]),
                bmav_cmds=step_cmds,
                amav_poses=tuple(amav_poses),
                observations=tuple(observations),
                observed_by=tuple(tuple(v) for v in observed_by),
                group_of=group_of,
                plans=plans if epoch_step else None,
            )
        )

    return SimTrace(config, strategy, config.seed, records)


def run_baseline_station(config: ScenarioConfig) -> SimTrace:
    """Anchors stay at their fixed station poses; corrections happen in passing."""
    return run_scenario(replace(config, strategy="station"))


def run_baseline_greedy(config: ScenarioConfig) -> SimTrace:
    """Anchors replan with single-step lookahead instead of the full depth."""
    return run_scenario(replace(config, strategy="greedy"))


def run_dead_reckoning(config: ScenarioConfig) -> SimTrace:
    """No anchor assistance at all: beliefs integrate velocity measurements only."""
    return run_scenario(replace(config, strategy="dead_reckoning"))

"""Cooperative localization for heterogeneous MAV swarms, in simulation.

A few well-sensored anchor vehicles (AMAVs) fly among a larger fleet of
cheap vehicles (BMAVs) that can only dead-reckon on noisy velocity
measurements.  The anchors correct the fleet's drifting position estimates
with range/bearing observations; a central coordinator groups BMAVs by
proximity, steers them with a potential field, and plans each anchor's
motion a command interval ahead to keep estimation uncertainty low.
"""

from .config import (
    STRATEGIES,
    ConfigError,
    ScenarioConfig,
    default_config,
    emit_scenario,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .estimation import (
    Belief,
    EstimationError,
    correct,
    initial_belief,
    measurement_noise_cov,
    motion_process_noise,
    predict,
    rank_by_uncertainty,
    uncertainty,
)
from .grouping import GroupAssignment, assign_groups, region_boundary_check
from .metrics import MetricsSummary, compute_metrics, metrics_to_dict
from .navigation import NavParams, plan_bmav_cmd, wall_repulsors
from .scheduling import (
    Plan,
    SearchNode,
    expected_correction,
    plan_all,
    plan_amav,
    plan_amav_greedy,
)
from .sensing import FovParams, Observation, fov_contains, jacobian_h, observe, predict_observation
from .simulator import (
    SimTrace,
    StepRecord,
    run_baseline_greedy,
    run_baseline_station,
    run_dead_reckoning,
    run_scenario,
)
from .world import (
    HOVER,
    Arena,
    BmavTruth,
    MotionPrimitive,
    NoiseModel,
    Pose,
    sample_noise,
    step_amav,
    step_bmav_truth,
    wrap_angle,
)

__version__ = "0.1.0"

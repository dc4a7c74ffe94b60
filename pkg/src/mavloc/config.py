"""Scenario configuration: schema, defaults, validation, and YAML round-trip.

A scenario file is a nested key/value document.  Unknown keys are rejected,
omitted optional fields get the documented defaults, and the resolved form
(with every default made explicit) can be emitted back out; loading that
emitted file reproduces the configuration exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import yaml

from .navigation import NavParams
from .sensing import FovParams
from .world import Arena, MotionPrimitive, NoiseModel, Pose

STRATEGIES = ("nonmyopic", "greedy", "station", "dead_reckoning")
NOISE_MODES = ("per_step", "per_interval")

DEFAULT_ARENA = (12.0, 12.0)
DEFAULT_AMAV_COUNT = 5
DEFAULT_BMAV_COUNT = 20
DEFAULT_DELTA = 5
DEFAULT_HORIZON = 420
DEFAULT_DT = 1.0
DEFAULT_FOV_ANGLE_DEG = 120.0
DEFAULT_FOV_R_MAX = 1.0
DEFAULT_SPEEDS = (0.0, 1.0, 3.0)
DEFAULT_TURN_RATES = (0.0, 1.0, -1.0, 3.0, -3.0)
DEFAULT_MOTION_NOISE = (0.20, 0.02)
DEFAULT_RANGE_NOISE = (0.10, 0.05)
DEFAULT_BEARING_NOISE = (0.05, 0.05)
DEFAULT_DEST_MARGIN = 0.6
DEFAULT_SUCCESS_ACCURACY = (0.05, 0.1, 0.2, 0.3)
DEFAULT_SUCCESS_TIME_LIMITS = (60, 120, 200)

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class ConfigError(ValueError):
    """Raised for schema or invariant violations in scenario input."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario: every field explicit, every invariant checked."""

    arena: Arena
    amav_starts: tuple[Pose, ...]
    bmav_starts: tuple[tuple[float, float], ...]
    bmav_destinations: tuple[tuple[float, float], ...]
    delta: int
    horizon: int
    dt: float
    fov_angle_deg: float
    fov_r_max: float
    primitives: tuple[MotionPrimitive, ...]
    motion_noise: NoiseModel
    range_noise: NoiseModel
    bearing_noise: NoiseModel
    motion_noise_mode: str
    strategy: str
    seed: int
    beam_width: int | None
    amav_pose_noise_std: float
    station_poses: tuple[Pose, ...]
    nav: NavParams
    success_accuracy: tuple[float, ...]
    success_time_limits: tuple[int, ...]

    @property
    def amav_count(self) -> int:
        return len(self.amav_starts)

    @property
    def bmav_count(self) -> int:
        return len(self.bmav_starts)

    @property
    def fov(self) -> FovParams:
        return FovParams(math.radians(self.fov_angle_deg), self.fov_r_max)


def grid_positions(count: int, arena: Arena) -> list[tuple[float, float]]:
    """Uniform grid of cell centers covering the arena, row-major."""
    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    positions = []
    for k in range(count):
        row, col = divmod(k, cols)
        positions.append(
            ((col + 0.5) * arena.length / cols, (row + 0.5) * arena.width / rows)
        )
    return positions


def default_amav_starts(count: int, arena: Arena) -> tuple[Pose, ...]:
    return tuple(Pose(x, y, 0.0) for x, y in grid_positions(count, arena))


def default_station_poses(count: int, arena: Arena) -> tuple[Pose, ...]:
    """Grid placement with each station facing the arena center."""
    cx, cy = 0.5 * arena.length, 0.5 * arena.width
    poses = []
    for x, y in grid_positions(count, arena):
        heading = math.atan2(cy - y, cx - x) if (x, y) != (cx, cy) else 0.0
        poses.append(Pose(x, y, heading))
    return tuple(poses)


def default_bmav_starts(count: int, arena: Arena) -> tuple[tuple[float, float], ...]:
    """Sunflower layout around the arena center.

    Golden-angle spacing keeps every start on a distinct ray from the
    center, so the default radial destinations never coincide.
    """
    cx, cy = 0.5 * arena.length, 0.5 * arena.width
    scale = min(arena.length, arena.width)
    r_min, r_max = 0.12 * scale, 0.25 * scale
    starts = []
    for i in range(count):
        theta = i * _GOLDEN_ANGLE
        frac = math.sqrt(i / max(count - 1, 1))
        radius = r_min + (r_max - r_min) * frac
        starts.append((cx + radius * math.cos(theta), cy + radius * math.sin(theta)))
    return tuple(starts)


def default_destinations(
    starts, arena: Arena, margin: float = DEFAULT_DEST_MARGIN
) -> tuple[tuple[float, float], ...]:
    """Project each start radially outward from the center to the inset boundary.

    The margin keeps goals off the walls; destinations exactly on a wall sit
    inside the wall's repulsion zone and cannot be approached closely.
    """
    if not 0.0 < margin < 0.5 * min(arena.length, arena.width):
        raise ConfigError("bmavs.dest_margin: must be positive and below half the arena")
    cx, cy = 0.5 * arena.length, 0.5 * arena.width
    lo_x, hi_x = margin, arena.length - margin
    lo_y, hi_y = margin, arena.width - margin
    destinations = []
    for sx, sy in starts:
        dx, dy = sx - cx, sy - cy
        if math.hypot(dx, dy) < 1e-9:
            dx, dy = 1.0, 0.0
        t = math.inf
        if dx > 0:
            t = min(t, (hi_x - cx) / dx)
        elif dx < 0:
            t = min(t, (lo_x - cx) / dx)
        if dy > 0:
            t = min(t, (hi_y - cy) / dy)
        elif dy < 0:
            t = min(t, (lo_y - cy) / dy)
        destinations.append((cx + t * dx, cy + t * dy))
    return tuple(destinations)


def _require_mapping(value, context: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{context}: expected a mapping")
    return value


def _check_keys(mapping: dict, allowed, context: str) -> None:
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"{context}: unknown key(s) {', '.join(sorted(unknown))}")


def _as_float(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{context}: expected a number")
    return float(value)


def _as_int(value, context: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{context}: expected an integer")
    return value


def _as_position(value, context: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{context}: expected [x, y]")
    return (_as_float(value[0], context), _as_float(value[1], context))


def _as_pose(value, context: str) -> Pose:
    if not isinstance(value, (list, tuple)) or len(value) not in (2, 3):
        raise ConfigError(f"{context}: expected [x, y] or [x, y, heading]")
    phi = _as_float(value[2], context) if len(value) == 3 else 0.0
    return Pose(_as_float(value[0], context), _as_float(value[1], context), phi)


def _noise_from(mapping, context: str, default: tuple[float, float]) -> NoiseModel:
    mapping = _require_mapping(mapping, context)
    _check_keys(mapping, {"fraction", "floor"}, context)
    fraction = _as_float(mapping.get("fraction", default[0]), f"{context}.fraction")
    floor = _as_float(mapping.get("floor", default[1]), f"{context}.floor")
    if fraction < 0 or floor < 0:
        raise ConfigError(f"{context}: fraction and floor must be nonnegative")
    return NoiseModel(fraction, floor)


def _inside(arena: Arena, point, context: str) -> None:
    if not arena.contains(point[0], point[1]):
        raise ConfigError(f"{context}: position {tuple(point)} outside the arena")


def scenario_from_dict(data: dict | None) -> ScenarioConfig:
    """Build a validated, fully resolved configuration from a plain dict."""
    data = _require_mapping(data, "scenario")
    _check_keys(
        data,
        {
            "arena", "amavs", "bmavs", "delta", "horizon", "dt", "fov",
            "primitives", "noise", "strategy", "seed", "beam_width",
            "amav_pose_noise_std", "station", "navigation", "success",
        },
        "scenario",
    )

    arena_map = _require_mapping(data.get("arena"), "arena")
    _check_keys(arena_map, {"length", "width"}, "arena")
    try:
        arena = Arena(
            _as_float(arena_map.get("length", DEFAULT_ARENA[0]), "arena.length"),
            _as_float(arena_map.get("width", DEFAULT_ARENA[1]), "arena.width"),
        )
    except ValueError as exc:
        raise ConfigError(f"arena: {exc}") from None

    amav_map = _require_mapping(data.get("amavs"), "amavs")
    _check_keys(amav_map, {"count", "starts"}, "amavs")
    if "starts" in amav_map:
        raw = amav_map["starts"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("amavs.starts: expected a non-empty list")
        amav_starts = tuple(
            _as_pose(p, f"amavs.starts[{i}]") for i, p in enumerate(raw)
        )
        count = _as_int(amav_map.get("count", len(amav_starts)), "amavs.count")
        if count != len(amav_starts):
            raise ConfigError("amavs.count: does not match the number of starts")
    else:
        count = _as_int(amav_map.get("count", DEFAULT_AMAV_COUNT), "amavs.count")
        if count < 1:
            raise ConfigError("amavs.count: must be at least 1")
        amav_starts = default_amav_starts(count, arena)
    if len(amav_starts) < 1:
        raise ConfigError("amavs.count: must be at least 1")
    for i, pose in enumerate(amav_starts):
        _inside(arena, (pose.x1, pose.x2), f"amavs.starts[{i}]")

    bmav_map = _require_mapping(data.get("bmavs"), "bmavs")
    _check_keys(bmav_map, {"count", "starts", "destinations", "dest_margin"}, "bmavs")
    if "starts" in bmav_map:
        raw = bmav_map["starts"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("bmavs.starts: expected a non-empty list")
        bmav_starts = tuple(
            _as_position(p, f"bmavs.starts[{i}]") for i, p in enumerate(raw)
        )
        n = _as_int(bmav_map.get("count", len(bmav_starts)), "bmavs.count")
        if n != len(bmav_starts):
            raise ConfigError("bmavs.count: does not match the number of starts")
    else:
        n = _as_int(bmav_map.get("count", DEFAULT_BMAV_COUNT), "bmavs.count")
        if n < 1:
            raise ConfigError("bmavs.count: must be at least 1")
        bmav_starts = default_bmav_starts(n, arena)
    for i, point in enumerate(bmav_starts):
        _inside(arena, point, f"bmavs.starts[{i}]")

    margin = _as_float(bmav_map.get("dest_margin", DEFAULT_DEST_MARGIN), "bmavs.dest_margin")
    if "destinations" in bmav_map:
        raw = bmav_map["destinations"]
        if not isinstance(raw, list) or len(raw) != len(bmav_starts):
            raise ConfigError("bmavs.destinations: expected one [x, y] per BMAV")
        destinations = tuple(
            _as_position(p, f"bmavs.destinations[{i}]") for i, p in enumerate(raw)
        )
    else:
        destinations = default_destinations(bmav_starts, arena, margin)
    for i, point in enumerate(destinations):
        _inside(arena, point, f"bmavs.destinations[{i}]")

    delta = _as_int(data.get("delta", DEFAULT_DELTA), "delta")
    if delta < 1:
        raise ConfigError("delta: must be at least 1")
    horizon = _as_int(data.get("horizon", DEFAULT_HORIZON), "horizon")
    if horizon < delta:
        raise ConfigError("horizon: must be at least delta")
    dt = _as_float(data.get("dt", DEFAULT_DT), "dt")
    if dt <= 0:
        raise ConfigError("dt: must be positive")

    fov_map = _require_mapping(data.get("fov"), "fov")
    _check_keys(fov_map, {"angle_deg", "r_max"}, "fov")
    fov_angle_deg = _as_float(fov_map.get("angle_deg", DEFAULT_FOV_ANGLE_DEG), "fov.angle_deg")
    fov_r_max = _as_float(fov_map.get("r_max", DEFAULT_FOV_R_MAX), "fov.r_max")
    if not 0.0 < fov_angle_deg <= 360.0:
        raise ConfigError("fov.angle_deg: must be in (0, 360]")
    if fov_r_max <= 0.0:
        raise ConfigError("fov.r_max: must be positive")

    prim_map = _require_mapping(data.get("primitives"), "primitives")
    _check_keys(prim_map, {"u", "omega", "pairs"}, "primitives")
    if "pairs" in prim_map:
        if "u" in prim_map or "omega" in prim_map:
            raise ConfigError("primitives: give either pairs or u/omega lists, not both")
        raw = prim_map["pairs"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("primitives.pairs: expected a non-empty list")
        primitives = tuple(
            MotionPrimitive(*_as_position(p, f"primitives.pairs[{i}]"))
            for i, p in enumerate(raw)
        )
    else:
        speeds = prim_map.get("u", list(DEFAULT_SPEEDS))
        rates = prim_map.get("omega", list(DEFAULT_TURN_RATES))
        if not isinstance(speeds, list) or not speeds:
            raise ConfigError("primitives.u: expected a non-empty list")
        if not isinstance(rates, list) or not rates:
            raise ConfigError("primitives.omega: expected a non-empty list")
        primitives = tuple(
            MotionPrimitive(_as_float(u, "primitives.u"), _as_float(w, "primitives.omega"))
            for u in speeds
            for w in rates
        )

    noise_map = _require_mapping(data.get("noise"), "noise")
    _check_keys(noise_map, {"motion", "range", "bearing", "motion_mode"}, "noise")
    motion_noise = _noise_from(noise_map.get("motion"), "noise.motion", DEFAULT_MOTION_NOISE)
    range_noise = _noise_from(noise_map.get("range"), "noise.range", DEFAULT_RANGE_NOISE)
    bearing_noise = _noise_from(noise_map.get("bearing"), "noise.bearing", DEFAULT_BEARING_NOISE)
    motion_mode = noise_map.get("motion_mode", "per_step")
    if motion_mode not in NOISE_MODES:
        raise ConfigError(f"noise.motion_mode: must be one of {NOISE_MODES}")

    strategy = data.get("strategy", "nonmyopic")
    if strategy not in STRATEGIES:
        raise ConfigError(f"strategy: must be one of {STRATEGIES}")
    seed = _as_int(data.get("seed", 0), "seed")
    if seed < 0:
        raise ConfigError("seed: must be nonnegative")

    beam_width = data.get("beam_width")
    if beam_width is not None:
        beam_width = _as_int(beam_width, "beam_width")
        if beam_width < 1:
            raise ConfigError("beam_width: must be at least 1 when given")

    pose_noise = _as_float(data.get("amav_pose_noise_std", 0.0), "amav_pose_noise_std")
    if pose_noise < 0:
        raise ConfigError("amav_pose_noise_std: must be nonnegative")

    station_map = _require_mapping(data.get("station"), "station")
    _check_keys(station_map, {"poses"}, "station")
    if "poses" in station_map:
        raw = station_map["poses"]
        if not isinstance(raw, list) or len(raw) != len(amav_starts):
            raise ConfigError("station.poses: expected one pose per anchor")
        station_poses = tuple(
            _as_pose(p, f"station.poses[{i}]") for i, p in enumerate(raw)
        )
        for i, pose in enumerate(station_poses):
            _inside(arena, (pose.x1, pose.x2), f"station.poses[{i}]")
    else:
        station_poses = default_station_poses(len(amav_starts), arena)

    nav_map = _require_mapping(data.get("navigation"), "navigation")
    _check_keys(
        nav_map, {"k_att", "k_rep", "rep_radius", "v_max", "arrive_radius"}, "navigation"
    )
    defaults = NavParams()
    try:
        nav = NavParams(
            k_att=_as_float(nav_map.get("k_att", defaults.k_att), "navigation.k_att"),
            k_rep=_as_float(nav_map.get("k_rep", defaults.k_rep), "navigation.k_rep"),
            rep_radius=_as_float(
                nav_map.get("rep_radius", defaults.rep_radius), "navigation.rep_radius"
            ),
            v_max=_as_float(nav_map.get("v_max", defaults.v_max), "navigation.v_max"),
            arrive_radius=_as_float(
                nav_map.get("arrive_radius", defaults.arrive_radius),
                "navigation.arrive_radius",
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"navigation: {exc}") from None

    success_map = _require_mapping(data.get("success"), "success")
    _check_keys(success_map, {"accuracy", "time_limits"}, "success")
    accuracy_raw = success_map.get("accuracy", list(DEFAULT_SUCCESS_ACCURACY))
    limits_raw = success_map.get("time_limits", list(DEFAULT_SUCCESS_TIME_LIMITS))
    if not isinstance(accuracy_raw, list) or not accuracy_raw:
        raise ConfigError("success.accuracy: expected a non-empty list")
    if not isinstance(limits_raw, list) or not limits_raw:
        raise ConfigError("success.time_limits: expected a non-empty list")
    accuracy = tuple(_as_float(a, "success.accuracy") for a in accuracy_raw)
    if any(a <= 0 for a in accuracy):
        raise ConfigError("success.accuracy: thresholds must be positive")
    time_limits = tuple(_as_int(tau, "success.time_limits") for tau in limits_raw)
    if any(tau < 1 for tau in time_limits):
        raise ConfigError("success.time_limits: limits must be at least 1")

    return ScenarioConfig(
        arena=arena,
        amav_starts=amav_starts,
        bmav_starts=bmav_starts,
        bmav_destinations=destinations,
        delta=delta,
        horizon=horizon,
        dt=dt,
        fov_angle_deg=fov_angle_deg,
        fov_r_max=fov_r_max,
        primitives=primitives,
        motion_noise=motion_noise,
        range_noise=range_noise,
        bearing_noise=bearing_noise,
        motion_noise_mode=motion_mode,
        strategy=strategy,
        seed=seed,
        beam_width=beam_width,
        amav_pose_noise_std=pose_noise,
        station_poses=station_poses,
        nav=nav,
        success_accuracy=accuracy,
        success_time_limits=time_limits,
    )


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Resolved configuration as a plain dict; inverse of scenario_from_dict."""
    return {
        "arena": {"length": config.arena.length, "width": config.arena.width},
        "amavs": {
            "count": config.amav_count,
            "starts": [[p.x1, p.x2, p.phi] for p in config.amav_starts],
        },
        "bmavs": {
            "count": config.bmav_count,
            "starts": [list(p) for p in config.bmav_starts],
            "destinations": [list(p) for p in config.bmav_destinations],
        },
        "delta": config.delta,
        "horizon": config.horizon,
        "dt": config.dt,
        "fov": {"angle_deg": config.fov_angle_deg, "r_max": config.fov_r_max},
        "primitives": {"pairs": [[p.u, p.omega] for p in config.primitives]},
        "noise": {
            "motion": {
                "fraction": config.motion_noise.sigma_fraction,
                "floor": config.motion_noise.floor,
            },
            "range": {
                "fraction": config.range_noise.sigma_fraction,
                "floor": config.range_noise.floor,
            },
            "bearing": {
                "fraction": config.bearing_noise.sigma_fraction,
                "floor": config.bearing_noise.floor,
            },
            "motion_mode": config.motion_noise_mode,
        },
        "strategy": config.strategy,
        "seed": config.seed,
        "beam_width": config.beam_width,
        "amav_pose_noise_std": config.amav_pose_noise_std,
        "station": {"poses": [[p.x1, p.x2, p.phi] for p in config.station_poses]},
        "navigation": {
            "k_att": config.nav.k_att,
            "k_rep": config.nav.k_rep,
            "rep_radius": config.nav.rep_radius,
            "v_max": config.nav.v_max,
            "arrive_radius": config.nav.arrive_radius,
        },
        "success": {
            "accuracy": list(config.success_accuracy),
            "time_limits": list(config.success_time_limits),
        },
    }


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    return scenario_from_dict(data)


def emit_scenario(config: ScenarioConfig, path) -> None:
    """Write the resolved configuration; load_scenario inverts this exactly."""
    with open(path, "w", encoding="utf-8") as handle:
        yaml.safe_dump(scenario_to_dict(config), handle, sort_keys=True)


def default_config(**overrides) -> ScenarioConfig:
    """Scenario with all defaults, plus top-level key overrides for tests/tools."""
    return scenario_from_dict(overrides)

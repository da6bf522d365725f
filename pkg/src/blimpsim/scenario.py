"""Scenario files: one JSON document describing a reproducible run.

The schema is strict: unknown keys are rejected with their full path, so a
typo in a hand-edited file fails loudly instead of silently falling back to a
default. Every section is optional and overrides the reference defaults
field-by-field; the bundled ``*.scenario`` files under ``blimpsim/scenarios``
are the normative fixtures. Serialization emits every field with Python's
shortest round-trip float repr, so serialize -> load -> serialize is a fixed
point and configs survive the trip bit-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .control import PidGains, default_gains
from .dynamics import MAX_DT, IntegratorKind
from .environment import Box, Obstacle, Plane, WindModel, max_penetration_depth
from .frames import EulerAngles
from .vehicle import BlimpParams, BlimpState, default_params

MODE_AUTOPILOT = "autopilot"
MODE_MANUAL_REPLAY = "manual-replay"

DEFAULT_WAYPOINT_TOLERANCE = 1.5  # m; switch radius for intermediate waypoints


class ScenarioError(ValueError):
    """Malformed or invalid scenario content; message carries the field path."""


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """Everything one reproducible run needs."""

    params: BlimpParams
    wind: WindModel
    obstacles: tuple[Obstacle, ...]
    initial_state: BlimpState
    mode: str
    goal: np.ndarray | None  # autopilot target in {W}
    trace_path: str | None  # manual-replay command trace
    gains: PidGains
    dt: float
    integrator: IntegratorKind
    max_duration: float
    goal_tolerance: float
    seed: int
    waypoints: tuple[np.ndarray, ...] = ()
    waypoint_tolerance: float = DEFAULT_WAYPOINT_TOLERANCE
    drag_enabled: bool = True
    name: str = "scenario"


def _err(path: str, message: str) -> ScenarioError:
    return ScenarioError(f"{path}: {message}")


def _check_keys(mapping: dict, allowed: tuple[str, ...], path: str):
    if not isinstance(mapping, dict):
        raise _err(path, f"expected an object, got {type(mapping).__name__}")
    for key in mapping:
        if key not in allowed:
            raise _err(path, f"unknown key {key!r} (allowed: {', '.join(allowed)})")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _err(path, f"expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise _err(path, f"must be finite, got {value!r}")
    return float(value)


def _vec3(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 3:
        raise _err(path, f"expected a list of 3 numbers, got {value!r}")
    return np.array([_number(v, f"{path}[{i}]") for i, v in enumerate(value)])


def _parse_vehicle(section: dict, path: str) -> BlimpParams:
    base = default_params()
    allowed = (
        "mass_total", "inertia", "thruster_offset_lateral", "thruster_offset_below_com",
        "buoyancy_offset", "buoyancy_force", "gravity", "thrust_max", "servo_range",
        "envelope_semi_axes", "drag_coefficient",
    )
    _check_keys(section, allowed, path)
    updates: dict = {}
    for key in ("mass_total", "thruster_offset_lateral", "thruster_offset_below_com",
                "buoyancy_offset", "buoyancy_force", "gravity", "thrust_max",
                "drag_coefficient"):
        if key in section:
            updates[key] = _number(section[key], f"{path}.{key}")
    if "inertia" in section:
        value = section["inertia"]
        if isinstance(value, list) and len(value) == 3 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            updates["inertia"] = np.diag([_number(v, f"{path}.inertia[{i}]") for i, v in enumerate(value)])
        elif isinstance(value, list) and len(value) == 3:
            updates["inertia"] = np.array([
                [_number(v, f"{path}.inertia[{i}][{j}]") for j, v in enumerate(row)]
                for i, row in enumerate(value)
            ])
        else:
            raise _err(f"{path}.inertia", "expected 3 diagonal entries or a 3x3 matrix")
    if "servo_range" in section:
        pair = section["servo_range"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise _err(f"{path}.servo_range", "expected [min, max]")
        updates["servo_range"] = (
            _number(pair[0], f"{path}.servo_range[0]"),
            _number(pair[1], f"{path}.servo_range[1]"),
        )
    if "envelope_semi_axes" in section:
        axes = _vec3(section["envelope_semi_axes"], f"{path}.envelope_semi_axes")
        updates["envelope_semi_axes"] = (float(axes[0]), float(axes[1]), float(axes[2]))
    try:
        return replace(base, **updates)
    except ValueError as exc:
        raise _err(path, str(exc)) from exc


def _parse_wind(section: dict | None, path: str, seed: int) -> WindModel:
    if section is None:
        return WindModel(turbulence_rms=0.0, seed=seed)  # no wind section: still air
    _check_keys(section, ("mean_wind", "turbulence_rms", "correlation_time"), path)
    kwargs: dict = {"seed": seed}
    if "mean_wind" in section:
        kwargs["mean_wind"] = _vec3(section["mean_wind"], f"{path}.mean_wind")
    if "turbulence_rms" in section:
        kwargs["turbulence_rms"] = _number(section["turbulence_rms"], f"{path}.turbulence_rms")
    if "correlation_time" in section:
        kwargs["correlation_time"] = _number(section["correlation_time"], f"{path}.correlation_time")
    try:
        return WindModel(**kwargs)
    except ValueError as exc:
        raise _err(path, str(exc)) from exc


def _parse_obstacle(entry: dict, path: str) -> Obstacle:
    if not isinstance(entry, dict) or "kind" not in entry:
        raise _err(path, "expected an object with a 'kind' key")
    kind = entry["kind"]
    try:
        if kind == "box":
            _check_keys(entry, ("kind", "min", "max", "restitution"), path)
            return Box(
                min_corner=_vec3(entry.get("min"), f"{path}.min"),
                max_corner=_vec3(entry.get("max"), f"{path}.max"),
                restitution=_number(entry.get("restitution", 0.2), f"{path}.restitution"),
            )
        if kind == "plane":
            _check_keys(entry, ("kind", "normal", "offset", "restitution"), path)
            return Plane(
                normal=_vec3(entry.get("normal"), f"{path}.normal"),
                offset=_number(entry.get("offset", 0.0), f"{path}.offset"),
                restitution=_number(entry.get("restitution", 0.2), f"{path}.restitution"),
            )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise _err(path, str(exc)) from exc
    raise _err(f"{path}.kind", f"unknown obstacle kind {kind!r} (expected 'box' or 'plane')")


def _parse_state(section: dict | None, path: str) -> BlimpState:
    if section is None:
        section = {}
    _check_keys(section, ("position", "velocity", "attitude", "angular_velocity"), path)
    position = _vec3(section["position"], f"{path}.position") if "position" in section else np.zeros(3)
    velocity = _vec3(section["velocity"], f"{path}.velocity") if "velocity" in section else np.zeros(3)
    attitude = (
        _vec3(section["attitude"], f"{path}.attitude")
        if "attitude" in section
        else np.zeros(3)
    )
    omega = (
        _vec3(section["angular_velocity"], f"{path}.angular_velocity")
        if "angular_velocity" in section
        else np.zeros(3)
    )
    try:
        return BlimpState(
            position=position,
            velocity=velocity,
            attitude=EulerAngles(float(attitude[0]), float(attitude[1]), float(attitude[2])),
            angular_velocity=omega,
            time=0.0,
        )
    except ValueError as exc:
        raise _err(path, str(exc)) from exc


def _parse_gains(section: dict | None, path: str) -> PidGains:
    if section is None:
        return default_gains()
    allowed = ("kp", "kd", "ki", "k_yaw", "integral_limit", "k_roll", "k_roll_d", "k_yaw_d", "yaw_law")
    _check_keys(section, allowed, path)
    base = default_gains()
    kwargs: dict = {"kp": base.kp, "kd": base.kd, "ki": base.ki}
    for key in ("kp", "kd", "ki"):
        if key in section:
            value = section[key]
            if isinstance(value, list):
                kwargs[key] = _vec3(value, f"{path}.{key}")
            else:
                kwargs[key] = np.full(3, _number(value, f"{path}.{key}"))
    for key in ("k_yaw", "integral_limit", "k_roll", "k_roll_d", "k_yaw_d"):
        if key in section:
            kwargs[key] = _number(section[key], f"{path}.{key}")
    if "yaw_law" in section:
        kwargs["yaw_law"] = section["yaw_law"]
    try:
        return PidGains(**kwargs)
    except ValueError as exc:
        raise _err(path, str(exc)) from exc


_TOP_KEYS = (
    "name", "mode", "dt", "integrator", "max_duration", "goal_tolerance", "seed",
    "drag_enabled", "goal", "waypoints", "waypoint_tolerance", "vehicle", "wind",
    "obstacles", "initial_state", "gains",
)


def loads(text: str, name: str = "scenario") -> ScenarioConfig:
    """Parse and fully validate a scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    _check_keys(doc, _TOP_KEYS, "scenario")

    if "name" in doc:
        if not isinstance(doc["name"], str):
            raise _err("scenario.name", "expected a string")
        name = doc["name"]

    mode = doc.get("mode")
    if mode not in (MODE_AUTOPILOT, MODE_MANUAL_REPLAY):
        raise _err("scenario.mode", f"expected '{MODE_AUTOPILOT}' or '{MODE_MANUAL_REPLAY}', got {mode!r}")

    dt = _number(doc.get("dt", 0.01), "scenario.dt")
    if not 0.0 < dt <= MAX_DT:
        raise _err("scenario.dt", f"must be in (0, {MAX_DT}], got {dt!r}")

    integrator_name = doc.get("integrator", IntegratorKind.RK4.value)
    try:
        integrator = IntegratorKind(integrator_name)
    except ValueError:
        raise _err(
            "scenario.integrator",
            f"expected one of {[k.value for k in IntegratorKind]}, got {integrator_name!r}",
        ) from None

    max_duration = _number(doc.get("max_duration", 60.0), "scenario.max_duration")
    if not max_duration > 0:
        raise _err("scenario.max_duration", f"must be > 0, got {max_duration!r}")

    goal_tolerance = _number(doc.get("goal_tolerance", 0.5), "scenario.goal_tolerance")
    if not goal_tolerance > 0:
        raise _err("scenario.goal_tolerance", f"must be > 0, got {goal_tolerance!r}")

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise _err("scenario.seed", f"expected an unsigned 64-bit integer, got {seed!r}")

    drag_enabled = doc.get("drag_enabled", True)
    if not isinstance(drag_enabled, bool):
        raise _err("scenario.drag_enabled", f"expected true/false, got {drag_enabled!r}")

    goal_value = doc.get("goal")
    goal: np.ndarray | None = None
    trace_path: str | None = None
    if mode == MODE_AUTOPILOT:
        if goal_value is None:
            raise _err("scenario.goal", "autopilot mode requires a [x, y, z] goal")
        goal = _vec3(goal_value, "scenario.goal")
    else:
        if isinstance(goal_value, str):
            trace_path = goal_value
        elif goal_value is not None:
            raise _err("scenario.goal", "manual-replay mode takes a trace file path (or null)")

    waypoints_value = doc.get("waypoints", [])
    if not isinstance(waypoints_value, list):
        raise _err("scenario.waypoints", "expected a list of [x, y, z] points")
    if waypoints_value and mode != MODE_AUTOPILOT:
        raise _err("scenario.waypoints", "waypoints only apply to autopilot mode")
    waypoints = tuple(
        _vec3(wp, f"scenario.waypoints[{i}]") for i, wp in enumerate(waypoints_value)
    )

    waypoint_tolerance = _number(
        doc.get("waypoint_tolerance", DEFAULT_WAYPOINT_TOLERANCE), "scenario.waypoint_tolerance"
    )
    if not waypoint_tolerance > 0:
        raise _err("scenario.waypoint_tolerance", f"must be > 0, got {waypoint_tolerance!r}")

    params = _parse_vehicle(doc.get("vehicle", {}), "scenario.vehicle")
    wind = _parse_wind(doc.get("wind"), "scenario.wind", seed)
    obstacles_value = doc.get("obstacles", [])
    if not isinstance(obstacles_value, list):
        raise _err("scenario.obstacles", "expected a list")
    obstacles = tuple(
        _parse_obstacle(ob, f"scenario.obstacles[{i}]") for i, ob in enumerate(obstacles_value)
    )
    initial_state = _parse_state(doc.get("initial_state"), "scenario.initial_state")
    gains = _parse_gains(doc.get("gains"), "scenario.gains")

    depth = max_penetration_depth(initial_state.position, obstacles, params)
    if depth > 0.5 * params.hull_radius:
        raise _err(
            "scenario.initial_state.position",
            f"starts {depth:.3f} m inside an obstacle (more than half the hull radius)",
        )

    return ScenarioConfig(
        params=params,
        wind=wind,
        obstacles=obstacles,
        initial_state=initial_state,
        mode=mode,
        goal=goal,
        trace_path=trace_path,
        gains=gains,
        dt=dt,
        integrator=integrator,
        max_duration=max_duration,
        goal_tolerance=goal_tolerance,
        seed=seed,
        waypoints=waypoints,
        waypoint_tolerance=waypoint_tolerance,
        drag_enabled=drag_enabled,
        name=name,
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario file; the name defaults to the file stem."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {p}: {exc}") from exc
    return loads(text, name=p.stem)


def _floats(values) -> list[float]:
    return [float(v) for v in values]


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Full plain-data form of a config (inverse of ``loads``)."""
    p = config.params
    obstacles = []
    for ob in config.obstacles:
        if isinstance(ob, Box):
            obstacles.append(
                {
                    "kind": "box",
                    "min": _floats(ob.min_corner),
                    "max": _floats(ob.max_corner),
                    "restitution": ob.restitution,
                }
            )
        else:
            obstacles.append(
                {
                    "kind": "plane",
                    "normal": _floats(ob.normal),
                    "offset": ob.offset,
                    "restitution": ob.restitution,
                }
            )
    s = config.initial_state
    g = config.gains
    return {
        "name": config.name,
        "mode": config.mode,
        "dt": config.dt,
        "integrator": config.integrator.value,
        "max_duration": config.max_duration,
        "goal_tolerance": config.goal_tolerance,
        "seed": config.seed,
        "drag_enabled": config.drag_enabled,
        "goal": _floats(config.goal) if config.goal is not None else config.trace_path,
        "waypoints": [_floats(wp) for wp in config.waypoints],
        "waypoint_tolerance": config.waypoint_tolerance,
        "vehicle": {
            "mass_total": p.mass_total,
            "inertia": [[float(v) for v in row] for row in p.inertia],
            "thruster_offset_lateral": p.thruster_offset_lateral,
            "thruster_offset_below_com": p.thruster_offset_below_com,
            "buoyancy_offset": p.buoyancy_offset,
            "buoyancy_force": p.buoyancy_force,
            "gravity": p.gravity,
            "thrust_max": p.thrust_max,
            "servo_range": _floats(p.servo_range),
            "envelope_semi_axes": _floats(p.envelope_semi_axes),
            "drag_coefficient": p.drag_coefficient,
        },
        "wind": {
            "mean_wind": _floats(config.wind.mean_wind),
            "turbulence_rms": config.wind.turbulence_rms,
            "correlation_time": config.wind.correlation_time,
        },
        "obstacles": obstacles,
        "initial_state": {
            "position": _floats(s.position),
            "velocity": _floats(s.velocity),
            "attitude": [s.attitude.phi, s.attitude.theta, s.attitude.psi],
            "angular_velocity": _floats(s.angular_velocity),
        },
        "gains": {
            "kp": _floats(g.kp),
            "kd": _floats(g.kd),
            "ki": _floats(g.ki),
            "k_yaw": g.k_yaw,
            "integral_limit": g.integral_limit,
            "k_roll": g.k_roll,
            "k_roll_d": g.k_roll_d,
            "k_yaw_d": g.k_yaw_d,
            "yaw_law": g.yaw_law,
        },
    }


def serialize_scenario(config: ScenarioConfig) -> str:
    return json.dumps(scenario_to_dict(config), indent=2) + "\n"


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    candidate = resources.files("blimpsim") / "scenarios" / f"{name}.scenario"
    with resources.as_file(candidate) as p:
        return Path(p)

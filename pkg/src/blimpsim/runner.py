"""Headless scenario execution: the step pipeline, trajectory log, metrics.

``SimCore`` owns the per-step pipeline (control -> allocation -> mixing ->
wind -> dynamics -> collision resolution) and is shared verbatim by headless
runs, command replay, and the live bridge, which is what makes a recorded
teleop session replay to a bit-identical trajectory: both paths execute the
same float operations in the same order against the same seeded streams.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .actuation import ActuatorCommand, allocate
from .control import (
    ZERO_INPUT,
    AutopilotState,
    ManualInput,
    autopilot_step,
    default_manual_limits,
    manual_map,
)
from .dynamics import ZERO_FORCE, NonFiniteStateError, drag_wrench, step
from .environment import WindSampler, max_penetration_depth, resolve_collisions
from .frames import GimbalLockError
from .scenario import MODE_AUTOPILOT, MODE_MANUAL_REPLAY, ScenarioConfig, ScenarioError

LOG_HEADER = (
    "t,x,y,z,vx,vy,vz,phi,theta,psi,wx,wy,wz,"
    "f1,f2,theta1,theta2,wind_x,wind_y,wind_z,contact"
)

MODE_MANUAL = "manual"


def _fmt(value: float) -> str:
    return format(value, ".17g")


@dataclass
class ContactEvent:
    """Bookkeeping for one resolved contact step."""

    time: float
    ke_in: float  # translational kinetic energy entering the contact
    ke_out: float
    penetration_after: float


class TrajectoryLog:
    """Per-step rows in LOG_HEADER order plus contact events."""

    def __init__(self):
        self.rows: list[tuple] = []
        self.contacts: list[ContactEvent] = []

    def append(self, state, cmd: ActuatorCommand, wind: np.ndarray, contact: bool):
        att = state.attitude
        self.rows.append(
            (
                state.time,
                state.position[0], state.position[1], state.position[2],
                state.velocity[0], state.velocity[1], state.velocity[2],
                att.phi, att.theta, att.psi,
                state.angular_velocity[0], state.angular_velocity[1], state.angular_velocity[2],
                cmd.f1, cmd.f2, cmd.theta1, cmd.theta2,
                wind[0], wind[1], wind[2],
                1 if contact else 0,
            )
        )

    def to_csv(self) -> str:
        lines = [LOG_HEADER]
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row[:-1]) + f",{row[-1]}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path):
        Path(path).write_text(self.to_csv())


@dataclass
class RunMetrics:
    """Summary quantities of one run."""

    reached_goal: bool = False
    time_to_goal: float | None = None
    path_length: float = 0.0
    max_altitude: float = -math.inf
    collision_count: int = 0
    max_penetration: float = 0.0
    final_error: float | None = None

    def to_dict(self) -> dict:
        return {
            "reached_goal": self.reached_goal,
            "time_to_goal": self.time_to_goal,
            "path_length": self.path_length,
            "max_altitude": self.max_altitude,
            "collision_count": self.collision_count,
            "max_penetration": self.max_penetration,
            "final_error": self.final_error,
        }


class SimulationAbort(RuntimeError):
    """Run aborted (gimbal lock or non-finite state); carries partial results."""

    def __init__(self, reason: Exception, log: TrajectoryLog, metrics: RunMetrics, state):
        super().__init__(f"simulation aborted at t={state.time:.4f}: {reason}")
        self.reason = reason
        self.log = log
        self.metrics = metrics
        self.state = state


@dataclass
class CommandTrace:
    """Timestamped manual inputs, held zero-order between samples."""

    times: list[float] = field(default_factory=list)
    inputs: list[ManualInput] = field(default_factory=list)

    def append(self, t: float, inp: ManualInput):
        if self.times and t <= self.times[-1]:
            raise ScenarioError(
                f"trace timestamps must be strictly increasing, got {t!r} after {self.times[-1]!r}"
            )
        self.times.append(t)
        self.inputs.append(inp)

    def sample(self, t: float) -> ManualInput:
        idx = bisect.bisect_right(self.times, t) - 1
        return self.inputs[idx] if idx >= 0 else ZERO_INPUT

    def to_csv(self) -> str:
        lines = ["t,surge,heave,yaw,roll"]
        for t, inp in zip(self.times, self.inputs):
            lines.append(",".join(_fmt(v) for v in (t, inp.surge, inp.heave, inp.yaw, inp.roll)))
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path):
        Path(path).write_text(self.to_csv())


def load_trace(path: str | Path) -> CommandTrace:
    """Read a command trace CSV (columns t,surge,heave,yaw,roll)."""
    p = Path(path)
    try:
        lines = p.read_text().splitlines()
    except OSError as exc:
        raise ScenarioError(f"cannot read trace {p}: {exc}") from exc
    if not lines or lines[0].strip() != "t,surge,heave,yaw,roll":
        raise ScenarioError(f"trace {p} must start with header 't,surge,heave,yaw,roll'")
    trace = CommandTrace()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ScenarioError(f"trace {p} line {lineno}: expected 5 columns, got {len(parts)}")
        try:
            values = [float(v) for v in parts]
        except ValueError as exc:
            raise ScenarioError(f"trace {p} line {lineno}: {exc}") from exc
        trace.append(values[0], ManualInput(*values[1:]))
    return trace


@dataclass
class StepRecord:
    """Everything one pipeline step produced (for logs and metrics)."""

    state: object
    cmd: ActuatorCommand
    wind: np.ndarray
    contact: bool
    ke_in: float
    ke_out: float
    penetration_after: float


class SimCore:
    """Deterministic step pipeline for one scenario run.

    Mode, manual input, and goal may be changed between steps (the bridge
    does); each ``advance`` performs exactly one fixed-dt step and consumes
    exactly three normal variates from the wind stream, so the float sequence
    is a pure function of (config, seed, per-step inputs).
    """

    def __init__(self, config: ScenarioConfig, seed: int | None = None):
        self.config = config
        self._seed = config.seed if seed is None else seed
        self._limits = default_manual_limits(config.params)
        self.reset()

    def reset(self):
        self.state = self.config.initial_state
        self.sampler = WindSampler(self.config.wind, seed=self._seed)
        self.mode = MODE_AUTOPILOT if self.config.mode == MODE_AUTOPILOT else MODE_MANUAL
        self.held_input = ZERO_INPUT
        self._targets = list(self.config.waypoints)
        if self.config.goal is not None:
            self._targets.append(self.config.goal)
        self._target_idx = 0
        first_goal = self._targets[0] if self._targets else np.zeros(3)
        self.autopilot = AutopilotState(goal=first_goal)

    @property
    def final_goal(self) -> np.ndarray | None:
        return self._targets[-1] if self._targets else None

    def set_mode(self, mode: str):
        if mode not in (MODE_AUTOPILOT, MODE_MANUAL):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode

    def set_manual_input(self, inp: ManualInput):
        self.held_input = inp

    def set_goal(self, goal: np.ndarray):
        """Point the autopilot at a new goal, dropping any waypoint schedule."""
        self._targets = [np.asarray(goal, dtype=float)]
        self._target_idx = 0
        self.autopilot = replace(self.autopilot, goal=self._targets[0])

    def _advance_waypoints(self):
        while self._target_idx < len(self._targets) - 1:
            target = self._targets[self._target_idx]
            if float(np.linalg.norm(self.state.position - target)) <= self.config.waypoint_tolerance:
                self._target_idx += 1
                self.autopilot = replace(self.autopilot, goal=self._targets[self._target_idx])
            else:
                break

    def advance(self) -> StepRecord:
        """Run one control + physics step and return what happened."""
        config = self.config
        if self.mode == MODE_AUTOPILOT and self._targets:
            self._advance_waypoints()
            cmd, self.autopilot = autopilot_step(
                self.state, self.autopilot, config.gains, config.params, config.dt
            )
        else:
            setpoint = manual_map(self.held_input, self._limits)
            cmd = allocate(setpoint, config.params).command

        wind = self.sampler.sample(config.dt)
        env_force = (
            drag_wrench(self.state, wind, config.params) if config.drag_enabled else ZERO_FORCE
        )
        new_state = step(self.state, cmd, env_force, config.dt, config.integrator, config.params)
        resolved = resolve_collisions(self.state, new_state, config.obstacles, config.params)
        contact = resolved is not new_state

        half_m = 0.5 * config.params.mass_total
        ke_in = half_m * float(new_state.velocity @ new_state.velocity)
        ke_out = half_m * float(resolved.velocity @ resolved.velocity)
        penetration = (
            max_penetration_depth(resolved.position, config.obstacles, config.params)
            if contact
            else 0.0
        )
        self.state = resolved
        return StepRecord(resolved, cmd, wind, contact, ke_in, ke_out, penetration)


def _execute(config: ScenarioConfig, next_input) -> tuple[TrajectoryLog, RunMetrics]:
    """Shared run loop; ``next_input`` supplies the manual input, or None for
    autopilot mode."""
    core = SimCore(config)
    log = TrajectoryLog()
    metrics = RunMetrics()
    goal = core.final_goal if config.mode == MODE_AUTOPILOT else None
    metrics.max_altitude = float(config.initial_state.position[2])

    in_contact = False
    n_steps = int(math.floor(config.max_duration / config.dt + 1e-9))
    for _ in range(n_steps):
        if goal is not None:
            err = float(np.linalg.norm(core.state.position - goal))
            if err <= config.goal_tolerance:
                metrics.reached_goal = True
                metrics.time_to_goal = core.state.time
                break
        if next_input is not None:
            core.set_manual_input(next_input(core.state.time))
        previous_position = core.state.position
        try:
            rec = core.advance()
        except (GimbalLockError, NonFiniteStateError) as exc:
            raise SimulationAbort(exc, log, metrics, core.state) from exc
        log.append(rec.state, rec.cmd, rec.wind, rec.contact)
        metrics.path_length += float(np.linalg.norm(rec.state.position - previous_position))
        metrics.max_altitude = max(metrics.max_altitude, float(rec.state.position[2]))
        if rec.contact:
            log.contacts.append(
                ContactEvent(rec.state.time, rec.ke_in, rec.ke_out, rec.penetration_after)
            )
            metrics.max_penetration = max(metrics.max_penetration, rec.penetration_after)
            if not in_contact:
                metrics.collision_count += 1
        in_contact = rec.contact

    if goal is not None:
        final_err = float(np.linalg.norm(core.state.position - goal))
        metrics.final_error = final_err
        if not metrics.reached_goal and final_err <= config.goal_tolerance:
            metrics.reached_goal = True
            metrics.time_to_goal = core.state.time
    return log, metrics


def run(config: ScenarioConfig) -> tuple[TrajectoryLog, RunMetrics]:
    """Execute a scenario headless until goal or max_duration.

    Autopilot scenarios chase their waypoint schedule; manual-replay scenarios
    require a trace path in the config and delegate to ``replay_commands``.
    """
    if config.mode == MODE_MANUAL_REPLAY:
        if config.trace_path is None:
            raise ScenarioError(
                "manual-replay scenario has no command trace; pass one explicitly"
            )
        return replay_commands(config, load_trace(config.trace_path))
    return _execute(config, None)


def replay_commands(config: ScenarioConfig, trace: CommandTrace) -> tuple[TrajectoryLog, RunMetrics]:
    """Re-run a manual session from its command trace (zero-order hold)."""
    return _execute(config, trace.sample)

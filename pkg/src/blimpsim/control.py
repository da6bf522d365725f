"""Both control modes: egocentric manual mapping and the PID position autopilot.

Manual flight maps joystick axes straight onto the commandable wrench channels
(surge, heave, yaw, roll), like driving a differential-drive robot. The
autopilot runs a PID on world position, rotates the desired force into the
body frame, flies its x/z components, and steers yaw toward the in-plane
direction of the desired force. Since the rotors cannot push backward, a goal
behind the vehicle is reached by turning around, not by reverse thrust.

The yaw law defaults to the signed heading error atan2(f_y, f_x), which
vanishes at alignment and carries turn direction. The unsigned arccos variant
(k_yaw * arccos(f_y / |f|)) is kept behind ``yaw_law="arccos"`` for comparison
runs; note it commands k_yaw * pi/2 even when perfectly aligned, so it cannot
regulate heading and exists only to document the difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .actuation import ActuatorCommand, WrenchSetpoint, allocate
from .frames import EulerAngles, ensure_finite, rotation_from_euler
from .vehicle import BlimpParams, BlimpState

DEAD_ZONE = 0.05  # stick travel mapped to exactly zero
FORCE_EPS = 1e-6  # N; below this the yaw law returns 0

YAW_LAW_SIGNED = "signed"
YAW_LAW_ARCCOS = "arccos"


@dataclass(frozen=True, eq=False)
class PidGains:
    """Diagonal PID gain matrices (stored as their diagonals) plus yaw/roll.

    integral_limit caps the integral term's force contribution per axis (N),
    i.e. |ki * integral| <= integral_limit: plain anti-windup.
    """

    kp: np.ndarray
    kd: np.ndarray
    ki: np.ndarray
    k_yaw: float = 0.002
    integral_limit: float = 0.02
    k_roll: float = 0.005
    k_roll_d: float = 0.002
    k_yaw_d: float = 0.002
    yaw_law: str = YAW_LAW_SIGNED

    def __post_init__(self):
        for name in ("kp", "kd", "ki"):
            diag = np.asarray(getattr(self, name), dtype=float)
            if diag.shape == ():
                diag = np.full(3, float(diag))
            if diag.shape != (3,) or not np.all(np.isfinite(diag)) or np.any(diag < 0):
                raise ValueError(f"{name} must be 3 finite non-negative diagonal entries")
            object.__setattr__(self, name, diag)
        if not self.integral_limit > 0:
            raise ValueError(f"integral_limit must be > 0, got {self.integral_limit!r}")
        if self.yaw_law not in (YAW_LAW_SIGNED, YAW_LAW_ARCCOS):
            raise ValueError(f"unknown yaw_law {self.yaw_law!r}")


def default_gains() -> PidGains:
    """Gains tuned against the closed-loop regulation and transit scenarios."""
    return PidGains(kp=np.full(3, 0.05), kd=np.full(3, 0.08), ki=np.full(3, 0.005))


@dataclass(frozen=True, eq=False)
class AutopilotState:
    """Controller memory: position-error integral and the active goal."""

    goal: np.ndarray
    integral_error: np.ndarray = None  # type: ignore[assignment]
    goal_velocity: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "goal", ensure_finite(self.goal, "goal"))
        integral = np.zeros(3) if self.integral_error is None else ensure_finite(
            self.integral_error, "integral_error"
        )
        object.__setattr__(self, "integral_error", integral)
        gv = np.zeros(3) if self.goal_velocity is None else ensure_finite(
            self.goal_velocity, "goal_velocity"
        )
        object.__setattr__(self, "goal_velocity", gv)


@dataclass(frozen=True)
class ManualInput:
    """Joystick axes in [-1, 1]; out-of-range values are clamped."""

    surge: float = 0.0
    heave: float = 0.0
    yaw: float = 0.0
    roll: float = 0.0

    def __post_init__(self):
        for name in ("surge", "heave", "yaw", "roll"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"non-finite manual axis {name}")
            object.__setattr__(self, name, min(max(value, -1.0), 1.0))


ZERO_INPUT = ManualInput()


@dataclass(frozen=True)
class ManualLimits:
    """Full-scale wrench reached at stick extremes."""

    max_fx: float
    max_fz: float
    max_tau_x: float
    max_tau_z: float


def default_manual_limits(params: BlimpParams) -> ManualLimits:
    """Full surge/heave uses both rotors; torque scales with the arm."""
    return ManualLimits(
        max_fx=2.0 * params.thrust_max,
        max_fz=2.0 * params.thrust_max,
        max_tau_x=params.thrust_max * params.thruster_offset_lateral,
        max_tau_z=params.thrust_max * params.thruster_offset_lateral,
    )


def _axis(value: float, scale: float) -> float:
    return 0.0 if abs(value) < DEAD_ZONE else value * scale


def manual_map(inp: ManualInput, limits: ManualLimits) -> WrenchSetpoint:
    """Linear stick-to-wrench mapping with a dead zone on every axis."""
    return WrenchSetpoint(
        fx=_axis(inp.surge, limits.max_fx),
        fz=_axis(inp.heave, limits.max_fz),
        tau_x=_axis(inp.roll, limits.max_tau_x),
        tau_z=_axis(inp.yaw, limits.max_tau_z),
    )


def pid_force(
    state: BlimpState, ap: AutopilotState, gains: PidGains, dt: float
) -> tuple[np.ndarray, AutopilotState]:
    """World-frame desired force from the PID law; advances the integral.

    f = kp * (goal - r) + kd * (goal_velocity - v) + ki * integral, with the
    integral advanced by the rectangle rule and clamped so its force
    contribution stays within +/- integral_limit per axis.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    err = ap.goal - state.position
    derr = ap.goal_velocity - state.velocity
    integral = ap.integral_error + err * dt
    active = gains.ki > 0.0
    cap = np.where(active, gains.integral_limit / np.where(active, gains.ki, 1.0), np.inf)
    integral = np.clip(integral, -cap, cap)
    force = gains.kp * err + gains.kd * derr + gains.ki * integral
    return force, replace(ap, integral_error=integral)


def desired_force_body(f_desired_world: np.ndarray, attitude: EulerAngles) -> np.ndarray:
    """Rotate a world-frame desired force into the body frame (R^T f)."""
    return rotation_from_euler(attitude).T @ f_desired_world


def yaw_compensation(f_body: np.ndarray, gains: PidGains) -> float:
    """Yaw torque steering the nose toward the desired-force direction.

    Signed law: k_yaw * atan2(f_y, f_x) — the in-plane heading error, zero at
    alignment, positive toward +y (turn left). Forces below FORCE_EPS return 0.
    """
    norm = float(np.linalg.norm(f_body))
    if norm <= FORCE_EPS:
        return 0.0
    if gains.yaw_law == YAW_LAW_ARCCOS:
        return gains.k_yaw * math.acos(min(max(f_body[1] / norm, -1.0), 1.0))
    return gains.k_yaw * math.atan2(f_body[1], f_body[0])


def autopilot_step(
    state: BlimpState,
    ap: AutopilotState,
    gains: PidGains,
    params: BlimpParams,
    dt: float,
) -> tuple[ActuatorCommand, AutopilotState]:
    """One autopilot cycle: PID force -> body frame -> wrench -> actuators.

    Two gap-fills keep the loop flyable with unidirectional rotors and a drag
    model that has no rotational damping. First, a backward force demand is
    clamped to zero: the rotors cannot realize it, and passing it into the
    allocator saturates both thrust directions identically, which cancels the
    yaw differential exactly when the vehicle most needs to turn around.
    Second, a yaw-rate damper (-k_yaw_d * omega_z) rides on the heading term,
    mirroring the roll damper; without any yaw dissipation the heading loop is
    an undamped oscillator and the vehicle orbits its goal forever.
    """
    f_world, ap = pid_force(state, ap, gains, dt)
    f_body = desired_force_body(f_world, state.attitude)
    tau_z = yaw_compensation(f_body, gains) - gains.k_yaw_d * state.angular_velocity[2]
    tau_x = -gains.k_roll * state.attitude.phi - gains.k_roll_d * state.angular_velocity[0]
    setpoint = WrenchSetpoint(
        fx=max(f_body[0], 0.0), fz=f_body[2], tau_x=tau_x, tau_z=tau_z
    )
    result = allocate(setpoint, params)
    return result.command, ap

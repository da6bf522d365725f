"""Newton-Euler rigid-body dynamics of the blimp and fixed-step integrators.

Translation: m * r_ddot = R @ f + f_e (+ drag), with f the thruster wrench in
{B} and f_e = (0, 0, f_b - m g) the combined buoyancy/gravity force in {W}.
Rotation: J @ omega_dot + omega x (J @ omega) = tau + tau_e in {B}, where
tau_e is the buoyancy torque about the COM.

The buoyancy torque is computed physically in {B}: arm (0, 0, l) crossed with
the body-frame buoyant force R^T (0, 0, f_b). For a rotation matrix this
equals R^T ((R (0,0,l)) x (0,0,f_b)), i.e. the same quantity mapped from {W};
the tests assert that identity.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .actuation import ActuatorCommand, BodyWrench, forward_mix
from .frames import EulerAngles, euler_rate_map, rotation_from_euler
from .vehicle import AIR_DENSITY, BlimpParams, BlimpState

MAX_DT = 0.05

ZERO_FORCE = np.zeros(3)


class IntegratorKind(str, Enum):
    SEMI_IMPLICIT_EULER = "semi-implicit-euler"
    RK4 = "rk4"


class NonFiniteStateError(RuntimeError):
    """Integration produced a non-finite state; carries the last good state."""

    def __init__(self, last_state: BlimpState, detail: str):
        super().__init__(f"non-finite state after t={last_state.time:.6f}: {detail}")
        self.last_state = last_state


class StateDerivative:
    """Time derivative of BlimpState (attitude entry holds Euler rates)."""

    __slots__ = ("d_position", "d_velocity", "d_attitude", "d_angular_velocity")

    def __init__(self, d_position, d_velocity, d_attitude, d_angular_velocity):
        self.d_position = d_position
        self.d_velocity = d_velocity
        self.d_attitude = d_attitude
        self.d_angular_velocity = d_angular_velocity


def external_wrench(state: BlimpState, params: BlimpParams) -> tuple[np.ndarray, np.ndarray]:
    """Buoyancy-plus-gravity force in {W} and buoyancy torque in {B}."""
    f_e = np.array([0.0, 0.0, params.buoyancy_force - params.mass_total * params.gravity])
    r = rotation_from_euler(state.attitude)
    # arm (0,0,l) x (R^T (0,0,f_b)): only the third column of R contributes.
    fb_body = r[2, :] * params.buoyancy_force  # R^T @ (0,0,f_b)
    l = params.buoyancy_offset
    tau_e = np.array([-l * fb_body[1], l * fb_body[0], 0.0])
    return f_e, tau_e


def drag_wrench(state: BlimpState, wind_velocity: np.ndarray, params: BlimpParams) -> np.ndarray:
    """Quadratic aerodynamic drag force in {W} (no torque).

    Per world axis: F = -0.5 * rho * C_d * A_axis * |v_rel| * v_rel, with the
    ellipsoid cross-section normal to that axis as the reference area. Wind
    enters through the relative velocity, which is what couples the vehicle's
    momentum to gusts.
    """
    a, b, c = params.envelope_semi_axes
    areas = np.array([math.pi * b * c, math.pi * a * c, math.pi * a * b])
    v_rel = state.velocity - wind_velocity
    return -0.5 * AIR_DENSITY * params.drag_coefficient * areas * np.abs(v_rel) * v_rel


def derivative(
    state: BlimpState,
    actuator_wrench: BodyWrench,
    env_force: np.ndarray,
    params: BlimpParams,
) -> StateDerivative:
    """Newton-Euler state derivative under the given body wrench and
    additional world-frame environment force (drag; zero in plain tests)."""
    r = rotation_from_euler(state.attitude)
    f_e, tau_e = external_wrench(state, params)
    accel = (r @ actuator_wrench.force + f_e + env_force) / params.mass_total
    omega = state.angular_velocity
    gyro = np.cross(omega, params.inertia @ omega)
    omega_dot = params.inertia_inv @ (actuator_wrench.torque + tau_e - gyro)
    att_rates = euler_rate_map(state.attitude) @ omega
    return StateDerivative(state.velocity, accel, att_rates, omega_dot)


def _offset_state(state: BlimpState, h: float, d: StateDerivative) -> BlimpState:
    att = state.attitude
    return BlimpState(
        position=state.position + h * d.d_position,
        velocity=state.velocity + h * d.d_velocity,
        attitude=EulerAngles(
            att.phi + h * d.d_attitude[0],
            att.theta + h * d.d_attitude[1],
            att.psi + h * d.d_attitude[2],
        ),
        angular_velocity=state.angular_velocity + h * d.d_angular_velocity,
        time=state.time + h,
    )


def step(
    state: BlimpState,
    cmd: ActuatorCommand,
    env_force: np.ndarray,
    dt: float,
    kind: IntegratorKind,
    params: BlimpParams,
) -> BlimpState:
    """Advance the state by one fixed step; bit-deterministic for fixed inputs.

    The actuator wrench and env_force are held constant over the step (zero-
    order hold); the world-frame thrust direction still tracks attitude inside
    the RK stages. Raises GimbalLockError or NonFiniteStateError on aborts,
    both carrying enough context to diagnose the run.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must be in (0, {MAX_DT}], got {dt!r}")
    wrench = forward_mix(cmd, params)

    if kind is IntegratorKind.RK4:
        k1 = derivative(state, wrench, env_force, params)
        k2 = derivative(_offset_state(state, dt / 2.0, k1), wrench, env_force, params)
        k3 = derivative(_offset_state(state, dt / 2.0, k2), wrench, env_force, params)
        k4 = derivative(_offset_state(state, dt, k3), wrench, env_force, params)
        sixth = dt / 6.0
        position = state.position + sixth * (
            k1.d_position + 2.0 * k2.d_position + 2.0 * k3.d_position + k4.d_position
        )
        velocity = state.velocity + sixth * (
            k1.d_velocity + 2.0 * k2.d_velocity + 2.0 * k3.d_velocity + k4.d_velocity
        )
        att_step = sixth * (
            k1.d_attitude + 2.0 * k2.d_attitude + 2.0 * k3.d_attitude + k4.d_attitude
        )
        omega = state.angular_velocity + sixth * (
            k1.d_angular_velocity
            + 2.0 * k2.d_angular_velocity
            + 2.0 * k3.d_angular_velocity
            + k4.d_angular_velocity
        )
    elif kind is IntegratorKind.SEMI_IMPLICIT_EULER:
        d = derivative(state, wrench, env_force, params)
        velocity = state.velocity + dt * d.d_velocity
        omega = state.angular_velocity + dt * d.d_angular_velocity
        position = state.position + dt * velocity  # updated velocity: symplectic flavor
        att_step = dt * (euler_rate_map(state.attitude) @ omega)
    else:
        raise ValueError(f"unknown integrator {kind!r}")

    att = state.attitude
    new_attitude = (att.phi + att_step[0], att.theta + att_step[1], att.psi + att_step[2])
    values = np.concatenate([position, velocity, new_attitude, omega])
    if not np.all(np.isfinite(values)):
        raise NonFiniteStateError(state, f"cmd={cmd}, env_force={env_force}")
    return BlimpState(
        position=position,
        velocity=velocity,
        attitude=EulerAngles(*new_attitude),
        angular_velocity=omega,
        time=state.time + dt,
    )

"""Thrust mixing and inverse allocation for the twin vectored thrusters.

Each rotor i produces a thrust f_i >= 0 tilted by its servo angle theta_i in
the body xz-plane, so the thrust vector is f_i * (cos theta_i, 0, sin theta_i)
applied at the mounting point p_i. ``forward_mix`` sums these into the net
body wrench; ``allocate`` inverts that map for the four commandable channels
(fx, fz, tau_x, tau_z). The body-y force is structurally zero and the body-y
torque rides along as l_b * fx; neither is commandable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .vehicle import BlimpParams


@dataclass(frozen=True)
class ActuatorCommand:
    """Physical control inputs: rotor thrusts (N) and servo tilts (rad).

    Rotors are unidirectional, so f1, f2 >= 0. Servo angles may exceed the
    servo range until ``saturate`` clamps them.
    """

    f1: float
    f2: float
    theta1: float
    theta2: float

    def __post_init__(self):
        for name in ("f1", "f2", "theta1", "theta2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite actuator field {name}")
        if self.f1 < 0 or self.f2 < 0:
            raise ValueError(f"rotor thrusts must be >= 0, got f1={self.f1!r} f2={self.f2!r}")


ZERO_COMMAND = ActuatorCommand(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class WrenchSetpoint:
    """Egocentric command: force and torque components in {B}."""

    fx: float
    fz: float
    tau_x: float
    tau_z: float

    def __post_init__(self):
        for name in ("fx", "fz", "tau_x", "tau_z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite wrench field {name}")


@dataclass(frozen=True, eq=False)
class BodyWrench:
    """Net thruster force and torque in {B}."""

    force: np.ndarray
    torque: np.ndarray


def forward_mix(cmd: ActuatorCommand, params: BlimpParams) -> BodyWrench:
    """Net body wrench generated by an actuator command.

    force = sum_i f_i (cos theta_i, 0, sin theta_i);
    torque = sum_i p_i x (that thrust vector).
    """
    f1x = cmd.f1 * math.cos(cmd.theta1)
    f1z = cmd.f1 * math.sin(cmd.theta1)
    f2x = cmd.f2 * math.cos(cmd.theta2)
    f2z = cmd.f2 * math.sin(cmd.theta2)
    d = params.thruster_offset_lateral
    lb = params.thruster_offset_below_com
    # p1 = (0,-d,lb), p2 = (0,d,lb) expanded through the cross products.
    force = np.array([f1x + f2x, 0.0, f1z + f2z])
    torque = np.array(
        [
            d * (f2z - f1z),
            lb * (f1x + f2x),
            d * (f1x - f2x),
        ]
    )
    return BodyWrench(force=force, torque=torque)


def saturate(cmd: ActuatorCommand, params: BlimpParams) -> ActuatorCommand:
    """Clamp thrusts to [0, thrust_max] and servo angles to the servo range."""
    lo, hi = params.servo_range
    return ActuatorCommand(
        f1=min(max(cmd.f1, 0.0), params.thrust_max),
        f2=min(max(cmd.f2, 0.0), params.thrust_max),
        theta1=min(max(cmd.theta1, lo), hi),
        theta2=min(max(cmd.theta2, lo), hi),
    )


@dataclass(frozen=True)
class AllocationResult:
    """Outcome of an allocation: the (saturated) command plus honesty data.

    ``feasible`` is False when the exact solution needed more thrust or servo
    travel than the hardware has; ``residual`` is the wrench the saturated
    command fails to deliver (requested minus achieved), so callers can see
    exactly what was lost rather than trusting a silently clipped command.
    """

    command: ActuatorCommand
    feasible: bool
    residual: WrenchSetpoint


def allocate(w: WrenchSetpoint, params: BlimpParams) -> AllocationResult:
    """Solve for the actuator command realizing a wrench setpoint.

    Splits (fx, fz) evenly and assigns the differential torque shares so that
    forward_mix(allocate(w).command) reproduces (fx, fz, tau_x, tau_z)
    exactly for feasible w: thruster 1 (at y = -d) carries +tau_z/d on its
    x-component and -tau_x/d on its z-component, thruster 2 the opposite.
    Per-thruster magnitude/angle come from the polar decomposition of the
    component targets; theta_i is 0 by convention for an idle rotor.
    """
    d = params.thruster_offset_lateral
    f1x = 0.5 * (w.fx + w.tau_z / d)
    f2x = 0.5 * (w.fx - w.tau_z / d)
    f1z = 0.5 * (w.fz - w.tau_x / d)
    f2z = 0.5 * (w.fz + w.tau_x / d)

    f1 = math.hypot(f1x, f1z)
    f2 = math.hypot(f2x, f2z)
    theta1 = math.atan2(f1z, f1x) if f1 > 0.0 else 0.0
    theta2 = math.atan2(f2z, f2x) if f2 > 0.0 else 0.0

    lo, hi = params.servo_range
    feasible = (
        f1 <= params.thrust_max
        and f2 <= params.thrust_max
        and lo <= theta1 <= hi
        and lo <= theta2 <= hi
    )
    command = saturate(ActuatorCommand(f1, f2, theta1, theta2), params)
    achieved = forward_mix(command, params)
    residual = WrenchSetpoint(
        fx=w.fx - achieved.force[0],
        fz=w.fz - achieved.force[2],
        tau_x=w.tau_x - achieved.torque[0],
        tau_z=w.tau_z - achieved.torque[2],
    )
    return AllocationResult(command=command, feasible=feasible, residual=residual)

"""Rotation and frame algebra shared by the whole stack.

World frame {W} is fixed, z up. Body frame {B} sits at the vehicle's center
of mass, x toward the nose, z up through the balloon. Orientation is kept as
roll-pitch-yaw Euler angles (phi, theta, psi) about the world x, y, z axes;
the rotation matrix factors as Rz(psi) @ Rx(phi) @ Ry(theta). The closed-form
matrix in ``rotation_from_euler`` was matched entry-by-entry against that
product (the third row -c_phi*s_theta, s_phi, c_phi*c_theta pins the order),
and the test suite re-verifies the factorization over random triples.

Euler angles keep logs human-readable but are singular at |phi| = pi/2; the
simulator treats approaching that cone as a diagnostic failure rather than
switching representation, since a blimp operates near level flight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# |phi| must stay below pi/2 - GIMBAL_LOCK_MARGIN for the rate map to be sane.
GIMBAL_LOCK_MARGIN = 1e-3


class GimbalLockError(ValueError):
    """Roll angle too close to +/- pi/2 for the Euler-rate kinematics."""

    def __init__(self, phi: float):
        super().__init__(
            f"roll angle {phi!r} rad is within {GIMBAL_LOCK_MARGIN} rad of gimbal lock"
        )
        self.phi = phi


def vec3(x: float, y: float, z: float) -> np.ndarray:
    """Build a float64 3-vector."""
    return np.array([x, y, z], dtype=float)


def ensure_finite(v: np.ndarray, name: str) -> np.ndarray:
    """Validate a finite 3-vector, returning it as float64."""
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite components: {arr}")
    return arr


@dataclass(frozen=True)
class EulerAngles:
    """Roll, pitch, yaw in radians about the world x, y, z axes."""

    phi: float
    theta: float
    psi: float

    def __post_init__(self):
        for name in ("phi", "theta", "psi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite Euler angle {name}={getattr(self, name)!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.theta, self.psi])


def rotation_from_euler(e: EulerAngles) -> np.ndarray:
    """Body-to-world rotation matrix for the given Euler angles.

    Equals Rz(psi) @ Rx(phi) @ Ry(theta); orthonormal with det +1.
    """
    cphi, sphi = math.cos(e.phi), math.sin(e.phi)
    cth, sth = math.cos(e.theta), math.sin(e.theta)
    cpsi, spsi = math.cos(e.psi), math.sin(e.psi)
    return np.array(
        [
            [cpsi * cth - sphi * spsi * sth, -cphi * spsi, cpsi * sth + cth * sphi * spsi],
            [cth * spsi + cpsi * sphi * sth, cphi * cpsi, spsi * sth - cpsi * cth * sphi],
            [-cphi * sth, sphi, cphi * cth],
        ]
    )


def euler_rate_map(e: EulerAngles) -> np.ndarray:
    """Matrix M mapping body angular velocity to Euler-angle rates.

    (phi_dot, theta_dot, psi_dot) = M @ omega, with omega in {B}. Derived from
    R_dot = R @ hat(omega) for R = Rz(psi) @ Rx(phi) @ Ry(theta): stacking the
    three axis columns gives omega = B(phi, theta) @ euler_rates with
    det(B) = cos(phi), and M is the closed-form inverse of B.

    Raises GimbalLockError when |phi| >= pi/2 - GIMBAL_LOCK_MARGIN.
    """
    if abs(e.phi) >= math.pi / 2 - GIMBAL_LOCK_MARGIN:
        raise GimbalLockError(e.phi)
    cphi = math.cos(e.phi)
    tphi = math.tan(e.phi)
    cth, sth = math.cos(e.theta), math.sin(e.theta)
    return np.array(
        [
            [cth, 0.0, sth],
            [sth * tphi, 1.0, -cth * tphi],
            [-sth / cphi, 0.0, cth / cphi],
        ]
    )


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of v, so that hat(v) @ w == cross(v, w)."""
    v = ensure_finite(v, "v")
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )

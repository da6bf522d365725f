"""Physical identity of one blimp: masses, geometry, buoyancy, actuator limits.

The reference vehicle follows the hardware it models: an ellipsoidal helium
envelope of 0.125 m^3 displacing enough air for roughly 65 g of net lift, a
chassis pod with two servo-tilted rotors hanging below the center of mass,
and the center of buoyancy sitting above it. All numbers are overridable per
scenario; anything a test depends on is spelled out there. A payload is
modeled by raising mass_total (it rides at the chassis COM), nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .frames import GIMBAL_LOCK_MARGIN, EulerAngles, GimbalLockError, ensure_finite

AIR_DENSITY = 1.225  # kg/m^3, fixed sea-level value (flights stay a few meters up)
HELIUM_DENSITY = 0.1786  # kg/m^3 at the same conditions
ENVELOPE_VOLUME = 0.125  # m^3, reference envelope

# Reference hull: a 0.40 x 0.30 m cross-section with the third semi-axis
# solved so the ellipsoid volume matches the reference envelope.
DEFAULT_SEMI_AXES = (0.40, 0.30, ENVELOPE_VOLUME / ((4.0 / 3.0) * math.pi * 0.40 * 0.30))


@dataclass(frozen=True, eq=False)
class BlimpParams:
    """Immutable physical parameters of one vehicle.

    thruster_offset_below_com (l_b) is signed: the stock chassis hangs below
    the COM, so it is negative. buoyancy_offset (l) is the distance from the
    COM up to the center of buoyancy along body z.
    """

    mass_total: float
    inertia: np.ndarray  # 3x3, body frame, kg m^2
    thruster_offset_lateral: float  # d, m
    thruster_offset_below_com: float  # l_b, m (signed)
    buoyancy_offset: float  # l, m
    buoyancy_force: float  # N
    gravity: float = 9.81
    thrust_max: float = 0.03  # N per rotor
    servo_range: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    envelope_semi_axes: tuple[float, float, float] = DEFAULT_SEMI_AXES
    drag_coefficient: float = 0.4

    def __post_init__(self):
        if not (math.isfinite(self.mass_total) and self.mass_total > 0):
            raise ValueError(f"mass_total must be positive, got {self.mass_total!r}")
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape != (3, 3) or not np.all(np.isfinite(inertia)):
            raise ValueError("inertia must be a finite 3x3 matrix")
        if not np.allclose(inertia, inertia.T, atol=1e-12):
            raise ValueError("inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(inertia) <= 0):
            raise ValueError("inertia must be positive definite")
        object.__setattr__(self, "inertia", inertia)
        if not self.thruster_offset_lateral > 0:
            raise ValueError("thruster_offset_lateral (d) must be > 0")
        if not self.thrust_max > 0:
            raise ValueError("thrust_max must be > 0")
        lo, hi = self.servo_range
        if not lo < hi:
            raise ValueError(f"servo_range must satisfy min < max, got {self.servo_range}")
        if any(s <= 0 for s in self.envelope_semi_axes):
            raise ValueError("envelope_semi_axes must all be > 0")
        for name in ("buoyancy_force", "buoyancy_offset", "gravity",
                     "thruster_offset_below_com", "drag_coefficient"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def thruster_positions(self) -> tuple[np.ndarray, np.ndarray]:
        """Mounting points p1, p2 in {B}: (0, -d, l_b) and (0, d, l_b)."""
        d = self.thruster_offset_lateral
        lb = self.thruster_offset_below_com
        return np.array([0.0, -d, lb]), np.array([0.0, d, lb])

    @property
    def hull_radius(self) -> float:
        """Bounding-sphere radius used for contact resolution."""
        return max(self.envelope_semi_axes)

    @cached_property
    def inertia_inv(self) -> np.ndarray:
        return np.linalg.inv(self.inertia)


@dataclass(frozen=True, eq=False)
class BlimpState:
    """Simulation state: world-frame pose/velocity, body-frame angular rate."""

    position: np.ndarray  # m, {W}
    velocity: np.ndarray  # m/s, {W}
    attitude: EulerAngles
    angular_velocity: np.ndarray  # rad/s, {B}
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", ensure_finite(self.position, "position"))
        object.__setattr__(self, "velocity", ensure_finite(self.velocity, "velocity"))
        object.__setattr__(
            self, "angular_velocity", ensure_finite(self.angular_velocity, "angular_velocity")
        )
        if not math.isfinite(self.time):
            raise ValueError("time must be finite")
        if abs(self.attitude.phi) >= math.pi / 2 - GIMBAL_LOCK_MARGIN:
            raise GimbalLockError(self.attitude.phi)


def net_buoyancy(
    envelope_volume: float,
    air_density: float,
    gas_density: float,
    envelope_mass: float,
    g: float = 9.81,
) -> float:
    """Net lift (N) an envelope offers to chassis plus payload.

    volume * (air_density - gas_density) * g minus the envelope's own weight.
    """
    if not envelope_volume > 0:
        raise ValueError(f"envelope_volume must be > 0, got {envelope_volume!r}")
    if not (air_density > 0 and gas_density > 0):
        raise ValueError("densities must be > 0")
    if not air_density > gas_density:
        raise ValueError(
            f"air_density ({air_density!r}) must exceed gas_density ({gas_density!r})"
        )
    return envelope_volume * (air_density - gas_density) * g - envelope_mass * g


def default_params() -> BlimpParams:
    """Reference vehicle in its neutral-buoyancy configuration.

    Mass splits evenly between the envelope shell (centered at the buoyancy
    offset) and the chassis pod (a point mass at the thruster arm); with the
    two offsets equal and opposite this balances the COM at the body origin.
    Inertia combines the thin homothetic-shell ellipsoid formula
    I = m * (sum of the two transverse semi-axes squared) / 3 with
    parallel-axis terms for both offsets; the shell formula is checked in the
    tests against a numerically integrated shell. The third semi-axis is
    solved from the 0.125 m^3 envelope volume.
    """
    mass_total = 0.065
    g = 9.81
    d = 0.10
    l_b = -0.15
    l = 0.15
    a, b, c = DEFAULT_SEMI_AXES

    m_shell = m_pod = mass_total / 2.0
    jxx = m_shell * (b * b + c * c) / 3.0 + m_shell * l * l + m_pod * l_b * l_b
    jyy = m_shell * (a * a + c * c) / 3.0 + m_shell * l * l + m_pod * l_b * l_b
    jzz = m_shell * (a * a + b * b) / 3.0

    return BlimpParams(
        mass_total=mass_total,
        inertia=np.diag([jxx, jyy, jzz]),
        thruster_offset_lateral=d,
        thruster_offset_below_com=l_b,
        buoyancy_offset=l,
        buoyancy_force=mass_total * g,
        gravity=g,
        thrust_max=0.03,
        servo_range=(-math.pi / 2, math.pi / 2),
        envelope_semi_axes=(a, b, c),
        drag_coefficient=0.4,
    )

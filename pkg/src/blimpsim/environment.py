"""Wind turbulence, static obstacles, and soft contact resolution.

Gusts follow a per-axis Ornstein-Uhlenbeck process: mean-reverting colored
noise whose stationary per-axis standard deviation equals the configured
turbulence_rms. Obstacles are axis-aligned boxes and infinite planes; the
envelope is collision-resolved as its bounding sphere, which is the point of
the hull: contact happens at the balloon before anything rigid can touch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .frames import ensure_finite
from .randomness import DeterministicRng
from .vehicle import BlimpParams, BlimpState

# Default per-axis sigma makes the gust-vector RMS magnitude ~0.4 m/s.
DEFAULT_TURBULENCE_RMS = 0.4 / math.sqrt(3.0)
DEFAULT_CORRELATION_TIME = 2.0

# Contacts shallower than this are left alone, which keeps resolution
# idempotent; it is far below the guaranteed residual-penetration bound.
CONTACT_SLACK = 1e-9

TANGENTIAL_DAMPING = 0.9


class InvalidScenarioError(ValueError):
    """Scenario geometry is unusable (e.g. vehicle starts inside an obstacle)."""


@dataclass(frozen=True, eq=False)
class WindModel:
    """Mean wind plus OU gust parameters; seed pins the stochastic stream."""

    mean_wind: np.ndarray = None  # type: ignore[assignment]
    turbulence_rms: float = DEFAULT_TURBULENCE_RMS  # sigma per axis, m/s
    correlation_time: float = DEFAULT_CORRELATION_TIME  # s
    seed: int = 0

    def __post_init__(self):
        mean = np.zeros(3) if self.mean_wind is None else ensure_finite(self.mean_wind, "mean_wind")
        object.__setattr__(self, "mean_wind", mean)
        if not self.turbulence_rms >= 0:
            raise ValueError(f"turbulence_rms must be >= 0, got {self.turbulence_rms!r}")
        if not self.correlation_time > 0:
            raise ValueError(f"correlation_time must be > 0, got {self.correlation_time!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


def sample_wind(
    model: WindModel, previous_gust: np.ndarray, dt: float, rng: DeterministicRng
) -> tuple[np.ndarray, np.ndarray]:
    """Advance the gust one step and return (wind, next_gust).

    Exact OU update: gust' = gust * e^(-dt/tau) + sigma * sqrt(1 - e^(-2dt/tau)) * xi
    with xi a standard normal per axis (drawn x, y, z in that order). The rng
    is advanced in place; it is the only state besides the gust itself.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    decay = math.exp(-dt / model.correlation_time)
    kick = model.turbulence_rms * math.sqrt(1.0 - decay * decay)
    gust = np.array(
        [
            previous_gust[0] * decay + kick * rng.normal(),
            previous_gust[1] * decay + kick * rng.normal(),
            previous_gust[2] * decay + kick * rng.normal(),
        ]
    )
    return model.mean_wind + gust, gust


class WindSampler:
    """Stateful wrapper owning one run's gust state and random stream."""

    def __init__(self, model: WindModel, seed: int | None = None):
        self.model = model
        self._seed = model.seed if seed is None else seed
        self.reset()

    def reset(self):
        self.rng = DeterministicRng(self._seed)
        self.gust = np.zeros(3)

    def sample(self, dt: float) -> np.ndarray:
        wind, self.gust = sample_wind(self.model, self.gust, dt, self.rng)
        return wind


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box obstacle given by its corner extents."""

    min_corner: np.ndarray
    max_corner: np.ndarray
    restitution: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "min_corner", ensure_finite(self.min_corner, "min_corner"))
        object.__setattr__(self, "max_corner", ensure_finite(self.max_corner, "max_corner"))
        if not np.all(self.max_corner > self.min_corner):
            raise ValueError("box extents must be positive on every axis")
        if not 0.0 <= self.restitution <= 1.0:
            raise ValueError(f"restitution must be in [0, 1], got {self.restitution!r}")


@dataclass(frozen=True, eq=False)
class Plane:
    """Infinite plane n . x = offset; the free half-space is n . x > offset."""

    normal: np.ndarray
    offset: float = 0.0
    restitution: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "normal", ensure_finite(self.normal, "normal"))
        if abs(float(np.linalg.norm(self.normal)) - 1.0) > 1e-6:
            raise ValueError(f"plane normal must be unit length, got {self.normal}")
        if not math.isfinite(self.offset):
            raise ValueError("plane offset must be finite")
        if not 0.0 <= self.restitution <= 1.0:
            raise ValueError(f"restitution must be in [0, 1], got {self.restitution!r}")


Obstacle = Box | Plane


def _sphere_contact(ob: Obstacle, center: np.ndarray, radius: float):
    """Penetration depth and outward contact normal, or None if clear."""
    if isinstance(ob, Plane):
        depth = radius - (float(ob.normal @ center) - ob.offset)
        if depth <= CONTACT_SLACK:
            return None
        return depth, ob.normal
    closest = np.minimum(np.maximum(center, ob.min_corner), ob.max_corner)
    delta = center - closest
    dist = float(np.linalg.norm(delta))
    if dist > 0.0:
        depth = radius - dist
        if depth <= CONTACT_SLACK:
            return None
        return depth, delta / dist
    # Center inside the box: push out through the nearest face.
    to_min = center - ob.min_corner
    to_max = ob.max_corner - center
    axis = int(np.argmin(np.minimum(to_min, to_max)))
    if to_min[axis] <= to_max[axis]:
        normal = np.zeros(3)
        normal[axis] = -1.0
        return radius + to_min[axis], normal
    normal = np.zeros(3)
    normal[axis] = 1.0
    return radius + to_max[axis], normal


def max_penetration_depth(
    position: np.ndarray, obstacles: list[Obstacle] | tuple[Obstacle, ...], params: BlimpParams
) -> float:
    """Deepest hull penetration at a position; 0.0 when clear."""
    radius = params.hull_radius
    deepest = 0.0
    for ob in obstacles:
        contact = _sphere_contact(ob, position, radius)
        if contact is not None:
            deepest = max(deepest, contact[0])
    return deepest


def resolve_collisions(
    pre: BlimpState,
    post: BlimpState,
    obstacles: list[Obstacle] | tuple[Obstacle, ...],
    params: BlimpParams,
    tangential_damping: float = TANGENTIAL_DAMPING,
) -> BlimpState:
    """Project a penetrating post-step state back to contact.

    The hull sphere is pushed out along the contact normal; an approaching
    normal velocity is reflected scaled by the obstacle's restitution and the
    tangential component is damped. Returns ``post`` unchanged (same object)
    when nothing is touching; applying the resolution twice equals applying it
    once. Never adds kinetic energy.
    """
    if not obstacles:
        return post
    radius = params.hull_radius
    if max_penetration_depth(pre.position, obstacles, params) > 0.5 * radius:
        raise InvalidScenarioError(
            f"state at t={pre.time:.3f} starts deeply penetrating an obstacle "
            f"(more than half the hull radius {radius})"
        )

    position = post.position
    velocity = post.velocity
    touched = False
    for _ in range(8):  # corner cases may need a few alternating projections
        deepest = None
        for ob in obstacles:
            contact = _sphere_contact(ob, position, radius)
            if contact is not None and (deepest is None or contact[0] > deepest[0]):
                deepest = (contact[0], contact[1], ob)
        if deepest is None:
            break
        depth, normal, ob = deepest
        position = position + depth * normal
        v_n = float(velocity @ normal)
        if v_n < 0.0:
            tangential = velocity - v_n * normal
            velocity = tangential_damping * tangential - ob.restitution * v_n * normal
        touched = True

    if not touched:
        return post
    return replace(post, position=position, velocity=velocity)

import math
from dataclasses import replace

import numpy as np
import pytest

from blimpsim.environment import (
    Box,
    InvalidScenarioError,
    Plane,
    WindModel,
    WindSampler,
    max_penetration_depth,
    resolve_collisions,
    sample_wind,
)
from blimpsim.frames import EulerAngles
from blimpsim.randomness import DeterministicRng
from blimpsim.vehicle import BlimpState, default_params

PARAMS = default_params()
RADIUS = PARAMS.hull_radius


def state_at(position, velocity=(0, 0, 0), t=0.0):
    return BlimpState(
        position=np.array(position, dtype=float),
        velocity=np.array(velocity, dtype=float),
        attitude=EulerAngles(0, 0, 0),
        angular_velocity=np.zeros(3),
        time=t,
    )


class TestSampleWind:
    def test_zero_sigma_is_mean_forever(self):
        model = WindModel(mean_wind=np.array([1.0, -0.5, 0.0]), turbulence_rms=0.0, seed=4)
        sampler = WindSampler(model)
        for _ in range(100):
            assert np.array_equal(sampler.sample(0.05), model.mean_wind)

    def test_fixed_seed_bit_identical(self):
        model = WindModel(turbulence_rms=0.3, correlation_time=1.5, seed=123)
        s1, s2 = WindSampler(model), WindSampler(model)
        for _ in range(500):
            a, b = s1.sample(0.01), s2.sample(0.01)
            assert np.array_equal(a, b)

    def test_stationary_std_sanity(self):
        model = WindModel(turbulence_rms=0.4, correlation_time=2.0, seed=99)
        sampler = WindSampler(model)
        n = 100_000
        acc = np.zeros(3)
        acc2 = np.zeros(3)
        for _ in range(n):
            sampler.sample(2.0)
            acc += sampler.gust
            acc2 += sampler.gust * sampler.gust
        std = np.sqrt(acc2 / n - (acc / n) ** 2)
        assert np.all(std > 0.385) and np.all(std < 0.415)

    def test_functional_form_matches_sampler(self):
        model = WindModel(turbulence_rms=0.2, correlation_time=0.7, seed=31)
        rng = DeterministicRng(31)
        gust = np.zeros(3)
        sampler = WindSampler(model)
        for _ in range(50):
            wind, gust = sample_wind(model, gust, 0.02, rng)
            assert np.array_equal(wind, sampler.sample(0.02))

    def test_dt_must_be_positive(self):
        model = WindModel(seed=1)
        with pytest.raises(ValueError):
            sample_wind(model, np.zeros(3), 0.0, DeterministicRng(1))


class TestObstacles:
    def test_box_extent_validation(self):
        with pytest.raises(ValueError):
            Box(min_corner=np.array([1.0, 0, 0]), max_corner=np.array([0.0, 1, 1]))

    def test_plane_normal_validation(self):
        with pytest.raises(ValueError):
            Plane(normal=np.array([0.0, 0.0, 2.0]))

    def test_restitution_range(self):
        with pytest.raises(ValueError):
            Plane(normal=np.array([0.0, 0.0, 1.0]), restitution=1.5)


class TestResolveCollisions:
    def test_clear_state_returned_unchanged(self):
        wall = Plane(normal=np.array([0.0, 0.0, 1.0]), offset=0.0)
        post = state_at([0, 0, 2.0], velocity=[0.1, 0, -0.1])
        out = resolve_collisions(state_at([0, 0, 2.1]), post, [wall], PARAMS)
        assert out is post

    def test_head_on_restitution(self):
        wall = Plane(normal=np.array([1.0, 0.0, 0.0]), offset=0.0, restitution=0.2)
        pre = state_at([RADIUS + 0.01, 0, 0], velocity=[-0.5, 0, 0])
        post = state_at([RADIUS - 0.02, 0, 0], velocity=[-0.5, 0, 0])
        out = resolve_collisions(pre, post, [wall], PARAMS)
        assert out.velocity[0] == pytest.approx(0.1, abs=1e-12)
        assert out.position[0] == pytest.approx(RADIUS, abs=1e-12)

    def test_grazing_tangential_damping(self):
        wall = Plane(normal=np.array([0.0, 0.0, 1.0]), offset=0.0, restitution=0.2)
        pre = state_at([0, 0, RADIUS + 0.005], velocity=[1.0, 0, -0.01])
        post = state_at([0.01, 0, RADIUS - 0.002], velocity=[1.0, 0, -0.01])
        out = resolve_collisions(pre, post, [wall], PARAMS)
        assert out.velocity[0] == pytest.approx(0.9, abs=1e-12)
        assert out.velocity[2] == pytest.approx(0.002, abs=1e-12)

    def test_idempotent(self):
        wall = Plane(normal=np.array([0.0, 0.0, 1.0]), offset=0.0, restitution=0.3)
        pre = state_at([0, 0, RADIUS + 0.01], velocity=[0.2, 0, -0.4])
        post = state_at([0, 0, RADIUS - 0.05], velocity=[0.2, 0, -0.4])
        once = resolve_collisions(pre, post, [wall], PARAMS)
        twice = resolve_collisions(pre, once, [wall], PARAMS)
        assert twice is once

    def test_energy_never_increases(self):
        rng = np.random.default_rng(8)
        wall = Plane(normal=np.array([0.0, 0.0, 1.0]), offset=0.0, restitution=0.8)
        box = Box(min_corner=np.array([1.0, -1.0, 0.0]), max_corner=np.array([2.0, 1.0, 2.0]),
                  restitution=0.5)
        checked = 0
        for _ in range(600):
            pos = np.array([rng.uniform(0.5, 2.5), rng.uniform(-0.5, 0.5), rng.uniform(0.35, 1.2)])
            vel = rng.normal(scale=0.5, size=3)
            pre = state_at(pos + np.array([0, 0, 0.3]))
            if max_penetration_depth(pre.position, [wall, box], PARAMS) > 0.5 * RADIUS:
                continue
            post = state_at(pos, velocity=vel)
            out = resolve_collisions(pre, post, [wall, box], PARAMS)
            assert out.velocity @ out.velocity <= vel @ vel + 1e-12
            checked += 1
        assert checked > 150

    def test_unit_restitution_preserves_normal_speed(self):
        wall = Plane(normal=np.array([0.0, 0.0, 1.0]), offset=0.0, restitution=1.0)
        pre = state_at([0, 0, RADIUS + 0.01], velocity=[0.3, -0.2, -0.7])
        post = state_at([0, 0, RADIUS - 0.03], velocity=[0.3, -0.2, -0.7])
        out = resolve_collisions(pre, post, [wall], PARAMS, tangential_damping=1.0)
        assert out.velocity[2] == pytest.approx(0.7, abs=1e-12)
        assert out.velocity[0] == pytest.approx(0.3, abs=1e-12)

    def test_residual_penetration_bound(self):
        box = Box(min_corner=np.array([-1.0, -1.0, -1.0]), max_corner=np.array([1.0, 1.0, 1.0]),
                  restitution=0.2)
        pre = state_at([0, 0, 1.0 + RADIUS + 0.05], velocity=[0, 0, -1.0])
        post = state_at([0.2, 0.1, 1.0 + RADIUS - 0.08], velocity=[0, 0, -1.0])
        out = resolve_collisions(pre, post, [box], PARAMS)
        assert max_penetration_depth(out.position, [box], PARAMS) <= 1e-6

    def test_box_corner_contact_normal(self):
        box = Box(min_corner=np.array([0.0, 0.0, 0.0]), max_corner=np.array([1.0, 1.0, 1.0]),
                  restitution=0.0)
        offset = np.array([1.0, 1.0, 0.5])
        direction = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
        pre = state_at(offset + direction * (RADIUS + 0.05))
        post = state_at(offset + direction * (RADIUS - 0.03), velocity=-direction)
        out = resolve_collisions(pre, post, [box], PARAMS)
        gap = out.position - offset
        assert np.linalg.norm(gap) == pytest.approx(RADIUS, abs=1e-9)
        assert out.velocity @ direction >= -1e-12

    def test_deep_initial_penetration_rejected(self):
        wall = Plane(normal=np.array([0.0, 0.0, 1.0]), offset=0.0)
        pre = state_at([0, 0, 0.1])  # more than half the hull radius inside
        post = state_at([0, 0, 0.1])
        with pytest.raises(InvalidScenarioError):
            resolve_collisions(pre, post, [wall], PARAMS)

    def test_no_obstacles_is_identity(self):
        post = state_at([0, 0, -5.0])
        assert resolve_collisions(state_at([0, 0, -5.0]), post, [], PARAMS) is post

import math
import random

import numpy as np
import pytest

from blimpsim.frames import (
    EulerAngles,
    GimbalLockError,
    euler_rate_map,
    hat,
    rotation_from_euler,
    vec3,
)


def rot_z(a):
    return np.array([[math.cos(a), -math.sin(a), 0], [math.sin(a), math.cos(a), 0], [0, 0, 1]])


def rot_x(a):
    return np.array([[1, 0, 0], [0, math.cos(a), -math.sin(a)], [0, math.sin(a), math.cos(a)]])


def rot_y(a):
    return np.array([[math.cos(a), 0, math.sin(a)], [0, 1, 0], [-math.sin(a), 0, math.cos(a)]])


def rodrigues(omega, h):
    """Closed-form exp(hat(omega) * h); the oracle for the rate-map check."""
    angle = np.linalg.norm(omega) * h
    if angle < 1e-14:
        return np.eye(3)
    axis = omega / np.linalg.norm(omega)
    k = hat(axis)
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def random_angles(rng, n):
    for _ in range(n):
        yield EulerAngles(
            rng.uniform(-math.pi / 2 + 0.05, math.pi / 2 - 0.05),
            rng.uniform(-math.pi, math.pi),
            rng.uniform(-math.pi, math.pi),
        )


class TestRotationFromEuler:
    def test_identity_at_zero(self):
        assert np.array_equal(rotation_from_euler(EulerAngles(0, 0, 0)), np.eye(3))

    def test_pure_yaw_quarter_turn(self):
        r = rotation_from_euler(EulerAngles(0, 0, math.pi / 2))
        expected = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
        assert np.allclose(r, expected, atol=1e-15)

    def test_matches_elementary_factorization(self):
        rng = random.Random(42)
        for e in random_angles(rng, 1000):
            r = rotation_from_euler(e)
            ref = rot_z(e.psi) @ rot_x(e.phi) @ rot_y(e.theta)
            assert np.abs(r - ref).max() < 1e-12

    def test_orthonormal_and_proper(self):
        rng = random.Random(7)
        for e in random_angles(rng, 1000):
            r = rotation_from_euler(e)
            assert np.abs(r @ r.T - np.eye(3)).max() < 1e-10
            assert abs(np.linalg.det(r) - 1.0) < 1e-10

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            EulerAngles(math.nan, 0, 0)
        with pytest.raises(ValueError):
            EulerAngles(0, math.inf, 0)


class TestEulerRateMap:
    def test_identity_at_zero_attitude(self):
        assert np.allclose(euler_rate_map(EulerAngles(0, 0, 0)), np.eye(3), atol=1e-15)

    def test_zero_omega_gives_zero_rates(self):
        rng = random.Random(3)
        for e in random_angles(rng, 20):
            assert np.array_equal(euler_rate_map(e) @ np.zeros(3), np.zeros(3))

    def test_gimbal_lock_raises_with_phi(self):
        bad = EulerAngles(math.pi / 2 - 1e-4, 0.2, 0.3)
        with pytest.raises(GimbalLockError) as exc:
            euler_rate_map(bad)
        assert exc.value.phi == bad.phi

    def test_finite_difference_order_two(self):
        """Stepping the Euler angles by M @ omega * h must track the true
        rotation flow R @ exp(hat(omega) h) to O(h^2)."""
        rng = random.Random(11)
        cases = []
        for e in random_angles(rng, 100):
            omega = np.array([rng.uniform(-1, 1) for _ in range(3)])
            cases.append((e, omega))
        errs = {}
        for h in (1e-3, 1e-4):
            worst = 0.0
            for e, omega in cases:
                de = euler_rate_map(e) @ omega * h
                stepped = rotation_from_euler(
                    EulerAngles(e.phi + de[0], e.theta + de[1], e.psi + de[2])
                )
                truth = rotation_from_euler(e) @ rodrigues(omega, h)
                worst = max(worst, np.abs(stepped - truth).max())
            errs[h] = worst
        order = math.log(errs[1e-3] / errs[1e-4]) / math.log(10.0)
        assert order >= 1.9


class TestHat:
    def test_zero_vector(self):
        assert np.array_equal(hat(vec3(0, 0, 0)), np.zeros((3, 3)))

    def test_right_hand_rule(self):
        assert np.array_equal(hat(vec3(1, 0, 0)) @ vec3(0, 1, 0), vec3(0, 0, 1))

    def test_matches_cross_product_and_antisymmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            v, w = rng.normal(size=3), rng.normal(size=3)
            m = hat(v)
            assert np.allclose(m @ w, np.cross(v, w), atol=1e-15)
            assert np.array_equal(m.T, -m)

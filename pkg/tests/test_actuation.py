import math
import random

import numpy as np
import pytest

from blimpsim.actuation import (
    ActuatorCommand,
    WrenchSetpoint,
    allocate,
    forward_mix,
    saturate,
)
from blimpsim.vehicle import BlimpParams, default_params


def make_params(d=0.1, lb=0.05, thrust_max=0.03):
    return BlimpParams(
        mass_total=0.065,
        inertia=np.diag([3e-3, 4e-3, 3e-3]),
        thruster_offset_lateral=d,
        thruster_offset_below_com=lb,
        buoyancy_offset=0.15,
        buoyancy_force=0.638,
        thrust_max=thrust_max,
    )


class TestForwardMix:
    def test_symmetric_forward_thrust(self):
        p = make_params(d=0.1, lb=0.05)
        w = forward_mix(ActuatorCommand(0.01, 0.01, 0.0, 0.0), p)
        assert np.allclose(w.force, [0.02, 0.0, 0.0], atol=1e-15)
        assert np.allclose(w.torque, [0.0, 0.001, 0.0], atol=1e-15)

    def test_symmetric_vertical_thrust_cancels_torque(self):
        p = make_params(d=0.1, lb=0.05)
        w = forward_mix(ActuatorCommand(0.01, 0.01, math.pi / 2, math.pi / 2), p)
        assert np.allclose(w.force, [0.0, 0.0, 0.02], atol=1e-15)
        assert np.allclose(w.torque, np.zeros(3), atol=1e-15)

    def test_idle_rotors_zero_wrench(self):
        w = forward_mix(ActuatorCommand(0.0, 0.0, 0.3, -0.7), make_params())
        assert np.array_equal(w.force, np.zeros(3))
        assert np.array_equal(w.torque, np.zeros(3))

    def test_force_y_identically_zero_and_torque_y_identity(self):
        p = make_params(lb=-0.15)
        rng = random.Random(1)
        for _ in range(500):
            cmd = ActuatorCommand(
                rng.uniform(0, 0.03), rng.uniform(0, 0.03),
                rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi),
            )
            w = forward_mix(cmd, p)
            assert w.force[1] == 0.0
            assert abs(w.torque[1] - p.thruster_offset_below_com * w.force[0]) < 1e-12

    def test_negative_thrust_rejected(self):
        with pytest.raises(ValueError):
            ActuatorCommand(-0.01, 0.0, 0.0, 0.0)


class TestAllocate:
    def test_pure_surge(self):
        res = allocate(WrenchSetpoint(0.02, 0.0, 0.0, 0.0), make_params())
        assert res.feasible
        assert res.command.f1 == pytest.approx(0.01, abs=1e-15)
        assert res.command.f2 == pytest.approx(0.01, abs=1e-15)
        assert res.command.theta1 == 0.0 and res.command.theta2 == 0.0

    def test_pure_heave(self):
        res = allocate(WrenchSetpoint(0.0, 0.02, 0.0, 0.0), make_params())
        assert res.feasible
        assert res.command.f1 == pytest.approx(0.01, abs=1e-15)
        assert res.command.theta1 == pytest.approx(math.pi / 2, abs=1e-15)
        assert res.command.theta2 == pytest.approx(math.pi / 2, abs=1e-15)

    def test_zero_wrench_angle_convention(self):
        res = allocate(WrenchSetpoint(0.0, 0.0, 0.0, 0.0), make_params())
        assert res.command == ActuatorCommand(0.0, 0.0, 0.0, 0.0)
        assert res.feasible

    def test_pure_yaw_at_rest_is_infeasible(self):
        """With unidirectional rotors and +/-90 deg servos, yaw with no surge
        needs a negative x-component on one thruster, i.e. theta = pi."""
        p = make_params(d=0.1)
        res = allocate(WrenchSetpoint(0.0, 0.0, 0.0, 0.001), p)
        assert not res.feasible
        # the raw solution wanted f2x = -0.005; the saturated command cannot
        # deliver the requested torque, and the residual says so
        assert abs(res.residual.tau_z) > 1e-4

    def test_round_trip_over_feasible_setpoints(self):
        p = default_params()
        rng = random.Random(2024)
        lo, hi = p.servo_range
        for _ in range(10_000):
            cmd = ActuatorCommand(
                rng.uniform(0, p.thrust_max), rng.uniform(0, p.thrust_max),
                rng.uniform(lo, hi), rng.uniform(lo, hi),
            )
            w = forward_mix(cmd, p)
            sp = WrenchSetpoint(w.force[0], w.force[2], w.torque[0], w.torque[2])
            res = allocate(sp, p)
            assert res.feasible
            achieved = forward_mix(res.command, p)
            for got, want in (
                (achieved.force[0], sp.fx),
                (achieved.force[2], sp.fz),
                (achieved.torque[0], sp.tau_x),
                (achieved.torque[2], sp.tau_z),
            ):
                assert abs(got - want) <= 1e-9 * max(1.0, abs(want))

    def test_positive_homogeneity(self):
        p = default_params()
        rng = random.Random(9)
        for _ in range(300):
            sp = WrenchSetpoint(
                rng.uniform(0, 0.02), rng.uniform(-0.02, 0.02),
                rng.uniform(-5e-4, 5e-4), rng.uniform(-5e-4, 5e-4),
            )
            res = allocate(sp, p)
            if not res.feasible:
                continue
            k = rng.uniform(0.1, 1.0)  # shrink: stays feasible
            scaled = allocate(
                WrenchSetpoint(k * sp.fx, k * sp.fz, k * sp.tau_x, k * sp.tau_z), p
            )
            assert scaled.command.f1 == pytest.approx(k * res.command.f1, abs=1e-12)
            assert scaled.command.f2 == pytest.approx(k * res.command.f2, abs=1e-12)
            if res.command.f1 > 1e-9:
                assert scaled.command.theta1 == pytest.approx(res.command.theta1, abs=1e-12)
            if res.command.f2 > 1e-9:
                assert scaled.command.theta2 == pytest.approx(res.command.theta2, abs=1e-12)


class TestSaturate:
    def test_in_range_unchanged(self):
        p = make_params()
        cmd = ActuatorCommand(0.01, 0.02, 0.3, -0.4)
        assert saturate(cmd, p) == cmd

    def test_thrust_clamped(self):
        p = make_params(thrust_max=0.03)
        assert saturate(ActuatorCommand(0.06, 0.0, 0.0, 0.0), p).f1 == 0.03

    def test_angle_clamped(self):
        p = make_params()
        assert saturate(ActuatorCommand(0.01, 0.01, math.pi, 0.0), p).theta1 == math.pi / 2

    def test_idempotent(self):
        p = make_params()
        once = saturate(ActuatorCommand(0.09, 0.0, 2.5, -3.0), p)
        assert saturate(once, p) == once

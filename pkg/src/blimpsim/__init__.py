"""Deterministic 6-DOF simulator and control stack for a bicopter blimp."""

from .actuation import (
    ActuatorCommand,
    AllocationResult,
    BodyWrench,
    WrenchSetpoint,
    allocate,
    forward_mix,
    saturate,
)
from .control import (
    AutopilotState,
    ManualInput,
    ManualLimits,
    PidGains,
    autopilot_step,
    default_gains,
    default_manual_limits,
    desired_force_body,
    manual_map,
    pid_force,
    yaw_compensation,
)
from .dynamics import (
    IntegratorKind,
    NonFiniteStateError,
    StateDerivative,
    derivative,
    drag_wrench,
    external_wrench,
    step,
)
from .environment import (
    Box,
    InvalidScenarioError,
    Obstacle,
    Plane,
    WindModel,
    WindSampler,
    resolve_collisions,
    sample_wind,
)
from .frames import (
    EulerAngles,
    GimbalLockError,
    euler_rate_map,
    hat,
    rotation_from_euler,
    vec3,
)
from .randomness import DeterministicRng
from .runner import (
    CommandTrace,
    RunMetrics,
    SimCore,
    SimulationAbort,
    TrajectoryLog,
    load_trace,
    replay_commands,
    run,
)
from .scenario import ScenarioConfig, ScenarioError, load_scenario, serialize_scenario
from .vehicle import BlimpParams, BlimpState, default_params, net_buoyancy

__version__ = "0.1.0"

"""Impulse-based hybrid motion control simulation.

Simulates a PD-regulated second-order plant with bounded uncertain damping
and optional Coulomb friction as a hybrid system: continuous flow between
state-axis crossings, impulsive velocity jumps at each crossing. Includes
closed-form oracles for the linear flow, reproducible experiment presets,
and a CLI for runs, comparisons and parameter sweeps.
"""

__version__ = "0.1.0"

from .dynamics import (
    ConstantDamping,
    DampingModel,
    FrictionConfig,
    MotionState,
    PlantParams,
    ScheduleDamping,
    TimeVaryingDamping,
    damping_at,
    flow_field,
)
from .errors import (
    DomainError,
    GuardMismatchError,
    NumericalDivergenceError,
    SimulationError,
    ZenoSuspicionError,
)
from .impulse_control import (
    ControllerParams,
    CrossingKind,
    Guard,
    JumpEvent,
    alpha_gain,
    beta_gain,
    c_weight,
    jump_map,
    pd_control,
)
from .analytic_oracle import (
    LinearSystem,
    exact_state,
    expm_series,
    velocity_jump_target,
)
from .hybrid_executor import (
    ExecutorConfig,
    SettlingReport,
    Trajectory,
    detect_guard,
    locate_event,
    run,
    step_flow,
)
from .scenarios import (
    ScenarioResult,
    ScenarioSpec,
    load_scenario,
    preset,
    preset_names,
    run_scenario,
    save_scenario,
)

__all__ = [
    "__version__",
    "ConstantDamping", "DampingModel", "FrictionConfig", "MotionState",
    "PlantParams", "ScheduleDamping", "TimeVaryingDamping", "damping_at",
    "flow_field",
    "DomainError", "GuardMismatchError", "NumericalDivergenceError",
    "SimulationError", "ZenoSuspicionError",
    "ControllerParams", "CrossingKind", "Guard", "JumpEvent", "alpha_gain",
    "beta_gain", "c_weight", "jump_map", "pd_control",
    "LinearSystem", "exact_state", "expm_series", "velocity_jump_target",
    "ExecutorConfig", "SettlingReport", "Trajectory", "detect_guard",
    "locate_event", "run", "step_flow",
    "ScenarioResult", "ScenarioSpec", "load_scenario", "preset",
    "preset_names", "run_scenario", "save_scenario",
]

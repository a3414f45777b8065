"""Named experiment presets, the scenario file format, and scenario execution.

A scenario bundles everything one run needs: plant constants, damping model,
friction, controller, executor settings, the initial state and which variants
to execute (with impulses, without, or both). Presets cover the standard
benchmark set on the normalized plant (m=0.1, K=10, D=0.5, damping bounds
[0.15, 1.5]):

  fig1_overdamped          PD-only baseline at the upper damping bound, the
                           critically damped response (no overshoot)
  fig1_underdamped         PD-only baseline at the lower bound, oscillatory
  fig2_underdamped_hybrid  lower bound, impulses on vs off
  fig4_timevarying         seeded filtered-noise damping, impulses on vs off
  fig5_coulomb             Coulomb friction (F_c/K = 0.1 dead-zone), x0 = 0.15

Scenario files are JSON, one document per scenario, mirroring the dataclass
fields; unknown keys are rejected. Presets round-trip through the format
bit-exactly.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional, Union

from .dynamics import (
    ConstantDamping,
    DampingModel,
    FrictionConfig,
    MotionState,
    PlantParams,
    ScheduleDamping,
    TimeVaryingDamping,
)
from .errors import DomainError
from .hybrid_executor import ExecutorConfig, Trajectory, run
from .impulse_control import ControllerParams

VARIANTS = ("impulses_on", "impulses_off", "both")


@dataclass(frozen=True)
class ScenarioSpec:
    """A fully specified, reproducible simulation setup."""

    name: str
    plant: PlantParams
    damping: DampingModel
    initial: MotionState
    friction: FrictionConfig = FrictionConfig()
    controller: ControllerParams = ControllerParams()
    executor: ExecutorConfig = ExecutorConfig()
    variants: str = "both"

    def __post_init__(self):
        if self.variants not in VARIANTS:
            raise DomainError(f"variants must be one of {VARIANTS}, got {self.variants!r}")


def _table_plant(F_c: float = 0.0) -> PlantParams:
    return PlantParams(m=0.1, K=10.0, D=0.5, d_lo=0.15, d_hi=1.5, F_c=F_c)


def _build_fig1_overdamped() -> ScenarioSpec:
    return ScenarioSpec(
        name="fig1_overdamped",
        plant=_table_plant(),
        damping=ConstantDamping(1.5),
        initial=MotionState(t=0.0, x=0.5, v=0.0),
        variants="impulses_off",
    )


def _build_fig1_underdamped() -> ScenarioSpec:
    return ScenarioSpec(
        name="fig1_underdamped",
        plant=_table_plant(),
        damping=ConstantDamping(0.15),
        initial=MotionState(t=0.0, x=0.5, v=0.0),
        variants="impulses_off",
    )


def _build_fig2_underdamped_hybrid() -> ScenarioSpec:
    return ScenarioSpec(
        name="fig2_underdamped_hybrid",
        plant=_table_plant(),
        damping=ConstantDamping(0.15),
        initial=MotionState(t=0.0, x=0.5, v=0.0),
        variants="both",
    )


def _build_fig4_timevarying() -> ScenarioSpec:
    return ScenarioSpec(
        name="fig4_timevarying",
        plant=_table_plant(),
        damping=TimeVaryingDamping(seed=42),
        initial=MotionState(t=0.0, x=0.5, v=0.0),
        variants="both",
    )


def _build_fig5_coulomb() -> ScenarioSpec:
    # Stick-slip under the velocity-jump law shrinks the stop positions only
    # quadratically (dx ~ x^2 per hop), so a micro-scale deadband would allow
    # hundreds of thousands of ever-smaller jumps; 1e-3 stops the cascade an
    # order of magnitude below the 0.01 convergence band.
    return ScenarioSpec(
        name="fig5_coulomb",
        plant=_table_plant(F_c=1.0),
        damping=ConstantDamping(0.15),
        initial=MotionState(t=0.0, x=0.15, v=0.0),
        friction=FrictionConfig(enabled=True, v_stick=1e-5),
        executor=ExecutorConfig(deadband_x=1e-3, deadband_v=1e-3),
        variants="both",
    )


_PRESETS = {
    "fig1_overdamped": _build_fig1_overdamped,
    "fig1_underdamped": _build_fig1_underdamped,
    "fig2_underdamped_hybrid": _build_fig2_underdamped_hybrid,
    "fig4_timevarying": _build_fig4_timevarying,
    "fig5_coulomb": _build_fig5_coulomb,
}

PRESET_SUMMARIES = {
    "fig1_overdamped": "PD-only baseline, constant d=1.5 (critically damped closed loop)",
    "fig1_underdamped": "PD-only baseline, constant d=0.15 (oscillatory decay)",
    "fig2_underdamped_hybrid": "constant d=0.15, impulsive control on vs off",
    "fig4_timevarying": "seeded filtered-noise damping inside [0.15, 1.5], on vs off",
    "fig5_coulomb": "Coulomb friction dead-zone (F_c/K=0.1) from x0=0.15, on vs off",
}


def preset_names() -> tuple:
    return tuple(_PRESETS)


def preset(name: str) -> ScenarioSpec:
    """Return a fresh, validated preset scenario by name."""
    try:
        builder = _PRESETS[name]
    except KeyError:
        raise DomainError(
            f"unknown preset {name!r}; available: {', '.join(_PRESETS)}") from None
    return builder()


# ---------------------------------------------------------------------------
# scenario file format (JSON, strict keys)

_DAMPING_KINDS = {
    "constant": ConstantDamping,
    "time_varying": TimeVaryingDamping,
    "schedule": ScheduleDamping,
}


def _damping_to_dict(model: DampingModel) -> dict:
    if isinstance(model, ConstantDamping):
        return {"kind": "constant", "value": model.value}
    if isinstance(model, TimeVaryingDamping):
        return {"kind": "time_varying", "seed": model.seed,
                "time_constant": model.time_constant,
                "noise_scale": model.noise_scale, "bias": model.bias}
    if isinstance(model, ScheduleDamping):
        return {"kind": "schedule",
                "breakpoints": [[t, d] for t, d in model.breakpoints]}
    raise DomainError(f"unknown damping model {type(model).__name__}")


def _strict_fields(cls, data: dict, where: str, defaults: Optional[dict] = None):
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise DomainError(f"unknown key(s) {sorted(unknown)} in {where}")
    merged = dict(defaults or {})
    merged.update(data)
    return cls(**merged)


def _damping_from_dict(data: dict) -> DampingModel:
    if not isinstance(data, dict) or "kind" not in data:
        raise DomainError("damping section needs a 'kind' key")
    kind = data["kind"]
    if kind not in _DAMPING_KINDS:
        raise DomainError(
            f"unknown damping kind {kind!r}; expected one of {sorted(_DAMPING_KINDS)}")
    body = {k: v for k, v in data.items() if k != "kind"}
    if kind == "schedule" and "breakpoints" in body:
        body["breakpoints"] = tuple(tuple(p) for p in body["breakpoints"])
    return _strict_fields(_DAMPING_KINDS[kind], body, f"damping ({kind})")


def to_dict(spec: ScenarioSpec) -> dict:
    """Plain-dict form of a scenario, with every field spelled out."""
    return {
        "name": spec.name,
        "plant": dataclasses.asdict(spec.plant),
        "damping": _damping_to_dict(spec.damping),
        "friction": dataclasses.asdict(spec.friction),
        "controller": dataclasses.asdict(spec.controller),
        "executor": dataclasses.asdict(spec.executor),
        "initial": {"t": spec.initial.t, "x": spec.initial.x, "v": spec.initial.v},
        "variants": spec.variants,
    }


_REQUIRED_SECTIONS = ("name", "plant", "damping", "initial")
_OPTIONAL_SECTIONS = ("friction", "controller", "executor", "variants")


def from_dict(data: dict) -> ScenarioSpec:
    """Build and validate a scenario from its dict form; unknown keys rejected."""
    if not isinstance(data, dict):
        raise DomainError("scenario document must be a JSON object")
    unknown = set(data) - set(_REQUIRED_SECTIONS) - set(_OPTIONAL_SECTIONS)
    if unknown:
        raise DomainError(f"unknown top-level key(s) {sorted(unknown)} in scenario")
    missing = [k for k in _REQUIRED_SECTIONS if k not in data]
    if missing:
        raise DomainError(f"scenario is missing required key(s) {missing}")

    plant = _strict_fields(PlantParams, data["plant"], "plant")
    damping = _damping_from_dict(data["damping"])
    initial = _strict_fields(MotionState, data["initial"], "initial",
                             defaults={"t": 0.0})
    friction = _strict_fields(FrictionConfig, data.get("friction", {}), "friction")
    controller = _strict_fields(ControllerParams, data.get("controller", {}),
                                "controller")
    executor = _strict_fields(ExecutorConfig, data.get("executor", {}), "executor")
    return ScenarioSpec(
        name=str(data["name"]),
        plant=plant,
        damping=damping,
        initial=initial,
        friction=friction,
        controller=controller,
        executor=executor,
        variants=data.get("variants", "both"),
    )


def save_scenario(spec: ScenarioSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(spec), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> ScenarioSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def apply_override(data: dict, path: str, raw_value: str) -> None:
    """Set a dotted-path key in a scenario dict, e.g. 'controller.gamma=0.6'.

    The raw value is parsed as JSON when possible (numbers, booleans, null,
    even whole objects), otherwise kept as a string. The path must address an
    existing key of the fully resolved dict.
    """
    keys = path.split(".")
    node = data
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise DomainError(f"override path {path!r} does not exist")
        node = node[key]
    leaf = keys[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise DomainError(f"override path {path!r} does not exist")
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    node[leaf] = value


def resolve(source: Union[str, dict, ScenarioSpec], overrides=(),
            seed: Optional[int] = None) -> dict:
    """Resolve a preset name, file dict or spec into a full, overridden dict.

    The result spells out every field (so overrides always find their key);
    ``seed`` replaces the damping seed when the model is time-varying.
    """
    if isinstance(source, ScenarioSpec):
        data = to_dict(source)
    elif isinstance(source, dict):
        data = to_dict(from_dict(source))
    else:
        data = to_dict(preset(source))
    for item in overrides:
        path, _, raw = item.partition("=")
        if not _:
            raise DomainError(f"override {item!r} is not of the form path=value")
        apply_override(data, path.strip(), raw.strip())
    if seed is not None and data["damping"].get("kind") == "time_varying":
        data["damping"]["seed"] = seed
    return data


# ---------------------------------------------------------------------------
# execution

@dataclass
class ScenarioResult:
    """Trajectories per executed variant plus derived comparisons."""

    spec: ScenarioSpec
    trajectories: dict

    def report(self, variant: str, tol: float = 1e-2):
        return self.trajectories[variant].settling_report(tol)

    def summary(self, tol: float = 1e-2) -> dict:
        out = {
            "scenario": self.spec.name,
            "settle_tolerance": tol,
            "variants": {v: t.settling_report(tol).as_dict()
                         for v, t in self.trajectories.items()},
        }
        if len(self.trajectories) == 2:
            on = self.trajectories["impulses_on"].settling_report(tol)
            off = self.trajectories["impulses_off"].settling_report(tol)
            ratio = None
            if on.settling_time is not None and off.settling_time:
                ratio = on.settling_time / off.settling_time
            out["comparison"] = {
                "settling_time_on": on.settling_time,
                "settling_time_off": off.settling_time,
                "settling_time_ratio": ratio,
                "first_entry_time_on": on.first_entry_time,
                "first_entry_time_off": off.first_entry_time,
                "peak_speed_on": on.peak_speed,
                "peak_speed_off": off.peak_speed,
                # soft metric: induced peak velocity relative to the baseline
                "peak_speed_ratio": (on.peak_speed / off.peak_speed
                                     if off.peak_speed else None),
                "jump_count_on": on.jump_count,
                "jump_count_off": off.jump_count,
            }
        return out


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Execute the scenario's variant(s); deterministic for identical specs."""
    if spec.variants == "both":
        wanted = ("impulses_on", "impulses_off")
    else:
        wanted = (spec.variants,)
    trajectories = {}
    for variant in wanted:
        trajectories[variant] = run(
            spec.initial, spec.plant, spec.damping, spec.friction,
            spec.controller, spec.executor,
            impulses_enabled=(variant == "impulses_on"))
    return ScenarioResult(spec=spec, trajectories=trajectories)

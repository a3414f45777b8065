"""Plant model: state and parameter types, damping models, and the continuous flow field.

The plant is the normalized second-order system

    m * x'' + d(t) * x' [+ F_c * sgn(x')] = u

with a bounded uncertain damping coefficient 0 < d_lo <= d(t) <= d_hi.
The derivative feedback -D*v is *not* part of the flow field here; it enters
through the continuous control force ``u_cont`` supplied by the controller
module, which keeps plant and regulator separated.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError


def _require_finite(**values: float) -> None:
    for name, val in values.items():
        if not math.isfinite(val):
            raise DomainError(f"{name} must be finite, got {val!r}")


def sgn(value: float) -> float:
    """Sign with sgn(0) = 0; the stiction branch owns the v = 0 case."""
    if value > 0.0:
        return 1.0
    if value < 0.0:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class MotionState:
    """One continuous-state sample: time, position, velocity."""

    t: float
    x: float
    v: float

    def __post_init__(self):
        _require_finite(t=self.t, x=self.x, v=self.v)


@dataclass(frozen=True)
class PlantParams:
    """Plant constants and PD gains.

    m     mass, > 0
    K     proportional gain, >= 0
    D     derivative gain, >= 0
    d_lo  lower damping bound, > 0
    d_hi  upper damping bound, >= d_lo
    F_c   Coulomb friction coefficient, >= 0
    x_r   set-point position (0 after the usual coordinate shift)
    """

    m: float
    K: float
    D: float
    d_lo: float
    d_hi: float
    F_c: float = 0.0
    x_r: float = 0.0

    def __post_init__(self):
        _require_finite(m=self.m, K=self.K, D=self.D, d_lo=self.d_lo,
                        d_hi=self.d_hi, F_c=self.F_c, x_r=self.x_r)
        if self.m <= 0.0:
            raise DomainError(f"mass must be positive, got {self.m}")
        if self.K < 0.0 or self.D < 0.0:
            raise DomainError("feedback gains K and D must be non-negative")
        if not (0.0 < self.d_lo <= self.d_hi):
            raise DomainError(
                f"damping bounds must satisfy 0 < d_lo <= d_hi, got "
                f"d_lo={self.d_lo}, d_hi={self.d_hi}")
        if self.F_c < 0.0:
            raise DomainError("Coulomb coefficient F_c must be non-negative")


@dataclass(frozen=True)
class FrictionConfig:
    """Coulomb friction switch plus the Karnopp stiction velocity threshold."""

    enabled: bool = False
    v_stick: float = 1e-5

    def __post_init__(self):
        if self.enabled:
            _require_finite(v_stick=self.v_stick)
            if self.v_stick <= 0.0:
                raise DomainError("v_stick must be positive when friction is enabled")


NO_FRICTION = FrictionConfig(enabled=False)


@dataclass(frozen=True)
class ConstantDamping:
    """d(t) = value, clamped into the plant's bounds on emission."""

    value: float

    kind = "constant"

    def __post_init__(self):
        _require_finite(value=self.value)

    def series(self, n: int, dt: float, d_lo: float, d_hi: float) -> list[float]:
        return [min(d_hi, max(d_lo, self.value))] * n

    def value_at(self, t: float, grid_index: int, dt: float,
                 d_lo: float, d_hi: float) -> float:
        return min(d_hi, max(d_lo, self.value))


@dataclass(frozen=True)
class ScheduleDamping:
    """Piecewise-constant damping from (t, d) breakpoints, hold-last beyond the end."""

    breakpoints: tuple

    kind = "schedule"

    def __post_init__(self):
        pts = tuple((float(t), float(d)) for t, d in self.breakpoints)
        if not pts:
            raise DomainError("schedule needs at least one (t, d) breakpoint")
        times = [p[0] for p in pts]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("schedule breakpoint times must be strictly increasing")
        for t, d in pts:
            _require_finite(t=t, d=d)
        object.__setattr__(self, "breakpoints", pts)

    def value_at(self, t: float, grid_index: int, dt: float,
                 d_lo: float, d_hi: float) -> float:
        times = [p[0] for p in self.breakpoints]
        idx = bisect.bisect_right(times, t) - 1
        if idx < 0:
            idx = 0  # hold-first before the schedule starts
        return min(d_hi, max(d_lo, self.breakpoints[idx][1]))

    def series(self, n: int, dt: float, d_lo: float, d_hi: float) -> list[float]:
        return [self.value_at(k * dt, k, dt, d_lo, d_hi) for k in range(n)]


@dataclass(frozen=True)
class TimeVaryingDamping:
    """Seeded filtered-noise damping held per grid step.

    Per grid step a uniform white-noise sample is drawn, passed through a
    first-order low-pass with the configured time constant, scaled, biased
    (to mid-band by default) and clamped into the plant's bounds. The output
    is a deterministic function of (seed, grid): same seed and same grid give
    a bit-identical sequence.
    """

    seed: int = 42
    time_constant: float = 0.05
    noise_scale: float = 25.0
    bias: Optional[float] = None

    kind = "time_varying"

    def __post_init__(self):
        _require_finite(time_constant=self.time_constant, noise_scale=self.noise_scale)
        if self.time_constant <= 0.0:
            raise DomainError("low-pass time constant must be positive")
        if self.bias is not None:
            _require_finite(bias=self.bias)

    def series(self, n: int, dt: float, d_lo: float, d_hi: float) -> list[float]:
        if dt <= 0.0:
            raise DomainError("dt must be positive for a time-varying damping grid")
        rng = np.random.default_rng(self.seed)
        noise = rng.uniform(-1.0, 1.0, size=n)
        alpha = dt / (self.time_constant + dt)
        one_minus = 1.0 - alpha
        bias = 0.5 * (d_lo + d_hi) if self.bias is None else self.bias
        scale = self.noise_scale
        y = 0.0
        out = []
        for k in range(n):
            y = alpha * noise[k] + one_minus * y
            d = bias + scale * y
            out.append(min(d_hi, max(d_lo, d)))
        return out

    def value_at(self, t: float, grid_index: int, dt: float,
                 d_lo: float, d_hi: float) -> float:
        # Point queries regenerate the prefix; sequential access should use series().
        if grid_index < 0:
            raise DomainError("grid_index must be non-negative")
        if dt is None or dt <= 0.0:
            raise DomainError("time-varying damping needs the grid step dt")
        return self.series(grid_index + 1, dt, d_lo, d_hi)[-1]


DampingModel = Union[ConstantDamping, ScheduleDamping, TimeVaryingDamping]


def damping_at(model: DampingModel, t: float, params: PlantParams,
               grid_index: int = 0, dt: Optional[float] = None) -> float:
    """Damping value at time t (grid index k for the stepwise models).

    Always returns a value inside [params.d_lo, params.d_hi].
    """
    _require_finite(t=t)
    if t < 0.0:
        raise DomainError("damping is defined for t >= 0")
    return model.value_at(t, grid_index, dt if dt is not None else 0.0,
                          params.d_lo, params.d_hi)


def _flow_rhs(x: float, v: float, m: float, f_c: float, d_now: float,
              u_cont: float, friction_on: bool, v_stick: float):
    """Right-hand side of the closed-loop flow, floats in / floats out.

    Slip:  (v, (u_cont - d*v - F_c*sgn(v)) / m)
    Stick: (0, 0) when |v| < v_stick and the driving force cannot break away.
    """
    if friction_on and f_c > 0.0:
        if abs(v) < v_stick and abs(u_cont) <= f_c:
            return 0.0, 0.0
        return v, (u_cont - d_now * v - f_c * sgn(v)) / m
    return v, (u_cont - d_now * v) / m


def flow_field(state: MotionState, params: PlantParams, d_now: float,
               u_cont: float, friction: Optional[FrictionConfig] = None):
    """State derivative (dx, dv) between jumps.

    ``u_cont`` is the continuous control force (the PD law evaluated by the
    controller); the derivative feedback is therefore not duplicated here.
    """
    _require_finite(d_now=d_now, u_cont=u_cont)
    if not (params.d_lo <= d_now <= params.d_hi):
        raise DomainError(
            f"damping {d_now} outside bounds [{params.d_lo}, {params.d_hi}]")
    friction = friction or NO_FRICTION
    return _flow_rhs(state.x, state.v, params.m, params.F_c, d_now, u_cont,
                     friction.enabled, friction.v_stick)

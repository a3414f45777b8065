"""PD regulator, impulsive gain laws, and the velocity-jump map.

Impulses act only on velocity (the input couples through B = (0, 1/m)^T), so
a jump never changes position or time. At a position-axis hit the gain
``alpha = gamma * m * |v0|`` contracts the velocity to (1 - 2*gamma)*v0; at a
velocity-axis hit the gain ``beta = |x0| * d_hi_assumed / (2c)`` retargets the
velocity to -x0 * d_hi_assumed / (2m), which is independent of the weighting c.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .dynamics import MotionState, PlantParams, _require_finite
from .errors import DomainError, GuardMismatchError


class Guard(enum.Enum):
    """Which state axis the trajectory hit."""

    POSITION = "position"
    VELOCITY = "velocity"


class CrossingKind(enum.Enum):
    """Effective zero crossing versus a sticking / creeping stop."""

    EFFECTIVE = "effective"
    STICKING = "sticking"


C_MODES = ("auto", "fixed1", "fixed2")


@dataclass(frozen=True)
class ControllerParams:
    """Impulsive-controller configuration.

    gamma          position-crossing gain ratio, alpha = gamma*m*|v0|; must
                   lie in [0.5, 1): below 0.5 the origin is unreachable,
                   at 1 the jump degenerates to an endless switching cycle.
    d_hi_assumed   upper damping bound the controller believes in; may differ
                   from the plant's true bound in mismatch studies.
    c_mode         'auto' picks c per crossing kind, 'fixed1'/'fixed2' override.
    """

    gamma: float = 0.6
    d_hi_assumed: float = 1.5
    c_mode: str = "auto"

    def __post_init__(self):
        _require_finite(gamma=self.gamma, d_hi_assumed=self.d_hi_assumed)
        if not (0.5 <= self.gamma < 1.0):
            raise DomainError(f"gamma must be in [0.5, 1), got {self.gamma}")
        if self.d_hi_assumed <= 0.0:
            raise DomainError("d_hi_assumed must be positive")
        if self.c_mode not in C_MODES:
            raise DomainError(f"c_mode must be one of {C_MODES}, got {self.c_mode!r}")


@dataclass(frozen=True)
class JumpEvent:
    """Record of one impulsive action."""

    t_event: float
    guard: Guard
    pre_state: MotionState
    post_state: MotionState
    gain_applied: float       # alpha or beta value
    c_used: int
    impulse_momentum: float   # m * (post.v - pre.v)
    located_by: str = "bisection"


def pd_control(state: MotionState, params: PlantParams) -> float:
    """Proportional-derivative force K*(x_r - x) - D*v."""
    return params.K * (params.x_r - state.x) - params.D * state.v


def alpha_gain(v0: float, params: PlantParams, ctrl: ControllerParams) -> float:
    """Position-crossing impulse gain alpha = gamma * m * |v0|."""
    return ctrl.gamma * params.m * abs(v0)


def beta_gain(x0: float, c: int, ctrl: ControllerParams) -> float:
    """Velocity-crossing impulse gain beta = |x0| * d_hi_assumed / (2c)."""
    if c not in (1, 2):
        raise DomainError(f"weighting c must be 1 or 2, got {c}")
    return abs(x0) * ctrl.d_hi_assumed / (2.0 * c)


def c_weight(crossing_kind: CrossingKind, ctrl: ControllerParams) -> int:
    """Dirac weighting: 2 at an effective crossing, 1 at a sticking stop."""
    if ctrl.c_mode == "fixed1":
        return 1
    if ctrl.c_mode == "fixed2":
        return 2
    return 2 if crossing_kind is CrossingKind.EFFECTIVE else 1


def position_jump_velocity(v_pre: float, gamma: float) -> float:
    """Velocity after a position-axis jump: (1 - 2*gamma) * v_pre.

    Algebraically identical to v_pre - (2*alpha/m)*sgn(v_pre) with
    alpha = gamma*m*|v_pre|; this form keeps the gamma = 0.5 dead-stop and
    the (excluded) gamma = 1 reversal exact in floating point.
    """
    return (1.0 - 2.0 * gamma) * v_pre


def velocity_jump_velocity(v_pre: float, x_pre: float, d_hi_assumed: float,
                           m: float) -> float:
    """Velocity after a velocity-axis jump: v_pre - x_pre * d_hi_assumed / (2m).

    Algebraically identical to v_pre - (c*beta/m)*sgn(x_pre) with
    beta = |x_pre|*d_hi_assumed/(2c); the weighting c cancels, so matched
    (beta, c) pairs land on the same successor velocity.
    """
    return v_pre - x_pre * d_hi_assumed / (2.0 * m)


def jump_map(pre: MotionState, guard: Guard, c: int, params: PlantParams,
             ctrl: ControllerParams, tol: float = 1e-9,
             located_by: str = "bisection"):
    """Apply the impulsive jump at a guard hit.

    Returns (post_state, JumpEvent). The pre state must lie on the named
    guard within ``tol``; jumps are instantaneous and act only on velocity.
    """
    if c not in (1, 2):
        raise DomainError(f"weighting c must be 1 or 2, got {c}")
    if guard is Guard.POSITION:
        if abs(pre.x) > tol:
            raise GuardMismatchError(
                f"state x={pre.x} not on the position axis (tol {tol})")
        post_v = position_jump_velocity(pre.v, ctrl.gamma)
        gain = alpha_gain(pre.v, params, ctrl)
    elif guard is Guard.VELOCITY:
        if abs(pre.v) > tol:
            raise GuardMismatchError(
                f"state v={pre.v} not on the velocity axis (tol {tol})")
        post_v = velocity_jump_velocity(pre.v, pre.x, ctrl.d_hi_assumed, params.m)
        gain = beta_gain(pre.x, c, ctrl)
    else:
        raise DomainError(f"unknown guard {guard!r}")

    post = MotionState(t=pre.t, x=pre.x, v=post_v)
    event = JumpEvent(
        t_event=pre.t,
        guard=guard,
        pre_state=pre,
        post_state=post,
        gain_applied=gain,
        c_used=c,
        impulse_momentum=params.m * (post_v - pre.v),
        located_by=located_by,
    )
    return post, event

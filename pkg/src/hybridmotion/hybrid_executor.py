"""Hybrid execution: fixed-step flow integration, guard detection, jumps.

The executor advances the closed loop with a fixed-step explicit 3rd-order
Runge-Kutta scheme (Bogacki-Shampine coefficient set, the method behind
Simulink's ode3), holds the damping at its grid value across each step,
watches both state axes for guard hits, refines crossing instants by
bisection on partial re-integrated steps, and applies the impulsive jump map
at each hit. Runs are deterministic: identical inputs give bit-identical
trajectories.

Guard handling rules:

* position guard first when both axes fire in one step; the velocity guard
  is re-evaluated on the remainder after the jump,
* impulses are suppressed inside the origin deadband (|x| and |v| both small),
* after a jump the same guard stays disarmed until its coordinate has left a
  band of 1000 * event_tol (refractory rule against numerical re-triggering),
* a stiction stop (Karnopp clamp at x != 0) is a velocity-axis hit of the
  "sticking" kind, weighted c = 1; strict sign changes are "effective"
  crossings, weighted c = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import (
    NO_FRICTION,
    FrictionConfig,
    MotionState,
    PlantParams,
    _flow_rhs,
    _require_finite,
)
from .errors import DomainError, NumericalDivergenceError, ZenoSuspicionError
from .impulse_control import (
    ControllerParams,
    CrossingKind,
    Guard,
    JumpEvent,
    c_weight,
    jump_map,
)

# the same guard re-arms only after its coordinate exceeded this many event
# tolerances at least once
REARM_FACTOR = 1e3


@dataclass(frozen=True)
class ExecutorConfig:
    """Integration and event-handling knobs."""

    dt: float = 1e-4            # fixed step size
    t_end: float = 5.0          # simulation horizon
    event_tol: float = 1e-9     # guard tolerance on |x| or |v| after bisection
    deadband_x: float = 1e-6    # origin deadband, position half-width
    deadband_v: float = 1e-6    # origin deadband, velocity half-width
    bisection_iters: int = 60   # max event refinement iterations
    max_jumps: int = 1_000_000  # safety cap before Zeno suspicion

    def __post_init__(self):
        _require_finite(dt=self.dt, t_end=self.t_end, event_tol=self.event_tol,
                        deadband_x=self.deadband_x, deadband_v=self.deadband_v)
        if self.dt <= 0.0 or self.t_end <= 0.0:
            raise DomainError("dt and t_end must be positive")
        if self.event_tol <= 0.0 or self.deadband_x <= 0.0 or self.deadband_v <= 0.0:
            raise DomainError("tolerances must be positive")
        if self.bisection_iters < 0:
            raise DomainError("bisection_iters must be non-negative")
        if self.max_jumps < 1:
            raise DomainError("max_jumps must be at least 1")


@dataclass(frozen=True)
class SettlingReport:
    """Scalar metrics derived deterministically from a trajectory."""

    settling_time: Optional[float]     # first time after which |x| < tol for good
    first_entry_time: Optional[float]  # first time |x| < tol at all
    overshoot: float                   # max excursion past zero after first approach
    peak_speed: float
    jump_count: int
    final_state: MotionState
    settle_tolerance: float
    position_l1: float                 # trapezoidal integral of |x| over the run

    def as_dict(self) -> dict:
        return {
            "settling_time": self.settling_time,
            "first_entry_time": self.first_entry_time,
            "overshoot": self.overshoot,
            "peak_speed": self.peak_speed,
            "jump_count": self.jump_count,
            "final_state": {"t": self.final_state.t, "x": self.final_state.x,
                            "v": self.final_state.v},
            "settle_tolerance": self.settle_tolerance,
            "position_l1": self.position_l1,
        }


class Trajectory:
    """Recorded run: grid samples plus pre/post rows at each jump instant.

    Columns are parallel lists (t, x, v, d, u_pd); ``jumps`` is the ordered
    event log. Samples are ordered by (t, record order); duplicate times occur
    only at jump instants.
    """

    __slots__ = ("t", "x", "v", "d", "u_pd", "jumps", "config", "_metrics")

    def __init__(self, t, x, v, d, u_pd, jumps, config):
        self.t = t
        self.x = x
        self.v = v
        self.d = d
        self.u_pd = u_pd
        self.jumps = jumps
        self.config = config
        self._metrics = None

    def __len__(self) -> int:
        return len(self.t)

    def arrays(self) -> dict:
        return {name: np.asarray(getattr(self, name))
                for name in ("t", "x", "v", "d", "u_pd")}

    @property
    def metrics(self) -> SettlingReport:
        if self._metrics is None:
            self._metrics = self.settling_report()
        return self._metrics

    def settling_report(self, tol: float = 1e-2) -> SettlingReport:
        t = np.asarray(self.t)
        x = np.asarray(self.x)
        v = np.asarray(self.v)
        abs_x = np.abs(x)
        below = abs_x < tol

        first_entry = float(t[int(np.argmax(below))]) if bool(below.any()) else None
        if bool(below[-1]):
            above = np.nonzero(~below)[0]
            settling = float(t[0]) if above.size == 0 else float(t[above[-1] + 1])
        else:
            settling = None

        nonzero = np.nonzero(x)[0]
        if nonzero.size == 0:
            overshoot = 0.0
        else:
            sign0 = 1.0 if x[nonzero[0]] > 0.0 else -1.0
            overshoot = float(max(0.0, np.max(-sign0 * x)))

        return SettlingReport(
            settling_time=settling,
            first_entry_time=first_entry,
            overshoot=overshoot,
            peak_speed=float(np.max(np.abs(v))),
            jump_count=len(self.jumps),
            final_state=MotionState(t=float(t[-1]), x=float(x[-1]), v=float(v[-1])),
            settle_tolerance=tol,
            position_l1=float(np.trapezoid(abs_x, t)),
        )


def _rk3_step(x, v, h, m, K, D, x_r, F_c, d, fric_on, v_stick):
    """One Bogacki-Shampine 3rd-order step; PD force evaluated at each stage,
    damping held constant across the step."""
    u1 = K * (x_r - x) - D * v
    k1x, k1v = _flow_rhs(x, v, m, F_c, d, u1, fric_on, v_stick)
    x2 = x + 0.5 * h * k1x
    v2 = v + 0.5 * h * k1v
    u2 = K * (x_r - x2) - D * v2
    k2x, k2v = _flow_rhs(x2, v2, m, F_c, d, u2, fric_on, v_stick)
    x3 = x + 0.75 * h * k2x
    v3 = v + 0.75 * h * k2v
    u3 = K * (x_r - x3) - D * v3
    k3x, k3v = _flow_rhs(x3, v3, m, F_c, d, u3, fric_on, v_stick)
    w = h / 9.0
    return (x + w * (2.0 * k1x + 3.0 * k2x + 4.0 * k3x),
            v + w * (2.0 * k1v + 3.0 * k2v + 4.0 * k3v))


def _stiction_clamp(x_new, v_prev, v_new, K, x_r, F_c, v_stick):
    """Karnopp clamp after a step: zero the velocity when it halted (or the
    integrator pushed it through zero) and the spring force cannot break away."""
    flipped = (v_prev > 0.0 and v_new < 0.0) or (v_prev < 0.0 and v_new > 0.0)
    if (abs(v_new) < v_stick or flipped) and abs(K * (x_r - x_new)) <= F_c:
        return 0.0, True
    return v_new, False


def _detect(px, pv, nx, nv, clamped, armed_pos, armed_vel, dbx, dbv):
    """Classify the guard hit between two consecutive states, if any.

    Position axis: strict sign change of x, or an exact landing on x = 0 with
    nonzero velocity. Velocity axis: the stiction clamp fired at x != 0
    (sticking stop), or a strict sign change of v (effective crossing).
    Returns None inside the origin deadband and for disarmed guards.
    """
    if abs(px) <= dbx and abs(pv) <= dbv:
        return None
    if armed_pos:
        if (px > 0.0 and nx < 0.0) or (px < 0.0 and nx > 0.0):
            return Guard.POSITION, CrossingKind.EFFECTIVE
        if nx == 0.0 and px != 0.0 and nv != 0.0:
            return Guard.POSITION, CrossingKind.EFFECTIVE
    if armed_vel:
        if clamped and abs(nx) > dbx:
            return Guard.VELOCITY, CrossingKind.STICKING
        if (pv > 0.0 and nv < 0.0) or (pv < 0.0 and nv > 0.0):
            return Guard.VELOCITY, CrossingKind.EFFECTIVE
    return None


def detect_guard(prev: MotionState, nxt: MotionState, cfg: ExecutorConfig,
                 clamped: bool = False, armed_position: bool = True,
                 armed_velocity: bool = True):
    """Public wrapper over the float-level detector for a (prev, next) pair."""
    if not prev.t < nxt.t:
        raise DomainError("prev must strictly precede next in time")
    return _detect(prev.x, prev.v, nxt.x, nxt.v, clamped,
                   armed_position, armed_velocity, cfg.deadband_x, cfg.deadband_v)


def _locate_crossing(x0, v0, x1, v1, h_full, guard, m, K, D, x_r, F_c, d,
                     fric_on, v_stick, tol, max_iters):
    """Refine a strict crossing inside a step of length h_full.

    Bisects the step fraction, re-integrating partial steps from (x0, v0),
    until the crossing coordinate is within ``tol``. Falls back to linear
    interpolation when no refinement is possible (zero iterations or a
    bracket that does not change sign under re-integration). The crossing
    coordinate of the returned state is snapped to exactly zero.

    Returns (h_event, x_event, v_event, method).
    """
    on_position = guard is Guard.POSITION
    c0 = x0 if on_position else v0
    c1 = x1 if on_position else v1

    if c1 == 0.0:
        # exact landing: the endpoint is already on the guard
        return h_full, (0.0 if on_position else x1), (v1 if on_position else 0.0), "exact"

    bracketed = (c0 > 0.0 and c1 < 0.0) or (c0 < 0.0 and c1 > 0.0)
    best = None
    if bracketed and max_iters > 0:
        lo, hi = 0.0, h_full
        hi_state = (x1, v1)
        sign_lo_positive = c0 > 0.0
        for _ in range(max_iters):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            xm, vm = _rk3_step(x0, v0, mid, m, K, D, x_r, F_c, d, fric_on, v_stick)
            cm = xm if on_position else vm
            if abs(cm) <= tol:
                best = (mid, xm, vm)
                break
            if (cm > 0.0) == sign_lo_positive:
                lo = mid
            else:
                hi = mid
                hi_state = (xm, vm)
        if best is None:
            # tolerance not met within the budget: take the sign-change side
            best = (hi, hi_state[0], hi_state[1])
        h_ev, x_ev, v_ev = best
        method = "bisection"
    else:
        theta = c0 / (c0 - c1)
        h_ev = theta * h_full
        x_ev = x0 + theta * (x1 - x0)
        v_ev = v0 + theta * (v1 - v0)
        method = "interpolation"

    if on_position:
        x_ev = 0.0
    else:
        v_ev = 0.0
    return h_ev, x_ev, v_ev, method


def step_flow(state: MotionState, dt: float, params: PlantParams, d_now: float,
              friction: Optional[FrictionConfig] = None):
    """One integration step of the flow with the damping held at ``d_now``.

    Returns (next_state, clamped) where ``clamped`` reports whether the
    stiction clamp zeroed the velocity at the end of the step.
    """
    _require_finite(dt=dt, d_now=d_now)
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    if not (params.d_lo <= d_now <= params.d_hi):
        raise DomainError(
            f"damping {d_now} outside bounds [{params.d_lo}, {params.d_hi}]")
    friction = friction or NO_FRICTION
    fric_on = friction.enabled and params.F_c > 0.0
    x1, v1 = _rk3_step(state.x, state.v, dt, params.m, params.K, params.D,
                       params.x_r, params.F_c, d_now, fric_on, friction.v_stick)
    clamped = False
    if fric_on:
        v1, clamped = _stiction_clamp(x1, state.v, v1, params.K, params.x_r,
                                      params.F_c, friction.v_stick)
    if not (math.isfinite(x1) and math.isfinite(v1)):
        raise NumericalDivergenceError(
            f"non-finite state after step from t={state.t}", state.t + dt, x1, v1)
    return MotionState(t=state.t + dt, x=x1, v=v1), clamped


def locate_event(prev: MotionState, nxt: MotionState, guard: Guard,
                 params: PlantParams, d_now: float, cfg: ExecutorConfig,
                 friction: Optional[FrictionConfig] = None):
    """Refine the guard hit between prev and next; returns (state, method)."""
    h_full = nxt.t - prev.t
    if h_full <= 0.0:
        raise DomainError("next must lie after prev")
    friction = friction or NO_FRICTION
    fric_on = friction.enabled and params.F_c > 0.0
    h_ev, x_ev, v_ev, method = _locate_crossing(
        prev.x, prev.v, nxt.x, nxt.v, h_full, guard,
        params.m, params.K, params.D, params.x_r, params.F_c, d_now,
        fric_on, friction.v_stick, cfg.event_tol, cfg.bisection_iters)
    return MotionState(t=prev.t + h_ev, x=x_ev, v=v_ev), method


def run(initial: MotionState, params: PlantParams, damping_model,
        friction: Optional[FrictionConfig], ctrl: ControllerParams,
        cfg: ExecutorConfig, impulses_enabled: bool = True) -> Trajectory:
    """Advance the closed-loop hybrid system from ``initial`` to the horizon.

    With ``impulses_enabled`` False the guards are ignored and the pure PD
    flow is recorded (the no-impulse baseline). Raises ZenoSuspicionError
    (carrying the partial trajectory) if the jump budget is exhausted and
    NumericalDivergenceError if integration produces a non-finite state.
    """
    friction = friction or NO_FRICTION
    m, K, D = params.m, params.K, params.D
    x_r, F_c = params.x_r, params.F_c
    fric_on = friction.enabled and F_c > 0.0
    v_stick = friction.v_stick
    tol = cfg.event_tol
    dbx, dbv = cfg.deadband_x, cfg.deadband_v
    rearm = REARM_FACTOR * tol
    dt = cfg.dt

    # time grid; a trailing partial step covers a horizon not divisible by dt
    n_full = int(math.floor(cfg.t_end / dt + 1e-9))
    h_last = cfg.t_end - n_full * dt
    if h_last <= 1e-12 * dt:
        h_last = 0.0
    t0 = initial.t
    grid = [t0 + k * dt for k in range(n_full + 1)]
    if h_last > 0.0:
        grid.append(t0 + cfg.t_end)
    n_steps = len(grid) - 1
    if n_steps < 1:
        raise DomainError("horizon shorter than one step")

    d_series = damping_model.series(n_steps + 1, dt, params.d_lo, params.d_hi)

    ts: list = []
    xs: list = []
    vs: list = []
    ds: list = []
    us: list = []
    events: list = []

    def record(t, x, v, d):
        ts.append(t)
        xs.append(x)
        vs.append(v)
        ds.append(d)
        us.append(K * (x_r - x) - D * v)

    def partial_trajectory():
        return Trajectory(ts, xs, vs, ds, us, events, cfg)

    x = initial.x
    v = initial.v
    armed_pos = True
    armed_vel = True

    def apply_jump(t_ev, x_ev, v_ev, guard, kind, located_by, d_here):
        nonlocal x, v, armed_pos, armed_vel
        if len(events) >= cfg.max_jumps:
            raise ZenoSuspicionError(
                f"jump budget {cfg.max_jumps} exhausted at t={t_ev:.6g}",
                partial_trajectory())
        c = c_weight(kind, ctrl)
        pre = MotionState(t=t_ev, x=x_ev, v=v_ev)
        post, event = jump_map(pre, guard, c, params, ctrl, tol=tol,
                               located_by=located_by)
        events.append(event)
        record(t_ev, pre.x, pre.v, d_here)
        record(t_ev, post.x, post.v, d_here)
        x, v = post.x, post.v
        if guard is Guard.POSITION:
            armed_pos = False
        else:
            armed_vel = False

    record(t0, x, v, d_series[0])

    if impulses_enabled:
        # the jump set is checked before flowing: an initial state resting on
        # an axis, outside the origin deadband, fires immediately
        if abs(x) <= tol and abs(v) > dbv:
            apply_jump(t0, 0.0, v, Guard.POSITION, CrossingKind.EFFECTIVE,
                       "exact", d_series[0])
        elif abs(v) <= tol and abs(x) > dbx:
            stuck = fric_on and abs(K * (x_r - x)) <= F_c
            kind = CrossingKind.STICKING if stuck else CrossingKind.EFFECTIVE
            apply_jump(t0, x, 0.0, Guard.VELOCITY, kind, "exact", d_series[0])

    for k in range(n_steps):
        d_k = d_series[k]
        t_base = grid[k]
        h_step = grid[k + 1] - t_base
        h_done = 0.0
        while True:
            h_rem = h_step - h_done
            if h_rem <= 0.0:
                break
            x1, v1 = _rk3_step(x, v, h_rem, m, K, D, x_r, F_c, d_k,
                               fric_on, v_stick)
            clamped = False
            if fric_on:
                v1, clamped = _stiction_clamp(x1, v, v1, K, x_r, F_c, v_stick)
            if not (math.isfinite(x1) and math.isfinite(v1)):
                raise NumericalDivergenceError(
                    f"integration diverged near t={t_base + h_done:.6g}",
                    t_base + h_done + h_rem, x1, v1)
            if not impulses_enabled:
                x, v = x1, v1
                break
            if not armed_pos and (abs(x) > rearm or abs(x1) > rearm):
                armed_pos = True
            if not armed_vel and (abs(v) > rearm or abs(v1) > rearm):
                armed_vel = True
            hit = _detect(x, v, x1, v1, clamped, armed_pos, armed_vel, dbx, dbv)
            if hit is None:
                x, v = x1, v1
                break
            guard, kind = hit
            if kind is CrossingKind.STICKING:
                # the clamp acts at the end of the sub-step: event time is its end
                apply_jump(t_base + h_step, x1, 0.0, guard, kind,
                           "stiction-clamp", d_k)
                h_done = h_step
                continue
            h_ev, x_ev, v_ev, method = _locate_crossing(
                x, v, x1, v1, h_rem, guard, m, K, D, x_r, F_c, d_k,
                fric_on, v_stick, tol, cfg.bisection_iters)
            if abs(x_ev) <= dbx and abs(v_ev) <= dbv:
                # impulse suppressed near the origin: flow straight through
                x, v = x1, v1
                break
            apply_jump(t_base + h_done + h_ev, x_ev, v_ev, guard, kind,
                       method, d_k)
            h_done += h_ev
        record(grid[k + 1], x, v, d_series[k + 1])

    return partial_trajectory()

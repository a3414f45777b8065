"""Closed-form solutions of the linear closed-loop flow, used as test oracles.

Between jumps and without Coulomb friction the closed loop is linear,
x' = A x with A = [[0, 1], [-K/m, -(d+D)/m]], so trajectories are matrix
exponentials. This module evaluates exp(A*t) through the eigenstructure
closed forms of the three damping regimes and also provides the brute-force
power-series exponential for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import MotionState, PlantParams, _require_finite
from .errors import DomainError

# Relative discriminant size below which the repeated-root (critically damped)
# formula is used; it is the numerically stable limit of the other two.
CRITICAL_REL_TOL = 1e-9


@dataclass(frozen=True)
class LinearSystem:
    """Closed-loop linear system x' = A x + B z for one constant damping value."""

    A: np.ndarray
    B: np.ndarray
    m: float
    K: float
    D: float
    d: float

    @classmethod
    def from_plant(cls, params: PlantParams, d: float) -> "LinearSystem":
        _require_finite(d=d)
        if d < 0.0:
            raise DomainError("damping must be non-negative")
        m, K, D = params.m, params.K, params.D
        A = np.array([[0.0, 1.0], [-K / m, -(d + D) / m]])
        B = np.array([[0.0], [1.0 / m]])
        return cls(A=A, B=B, m=m, K=K, D=D, d=d)

    @property
    def discriminant(self) -> float:
        """(d+D)^2 - 4mK; its sign selects the damping regime."""
        return (self.d + self.D) ** 2 - 4.0 * self.m * self.K

    def is_critically_damped(self) -> bool:
        return abs(self.discriminant) < CRITICAL_REL_TOL * (4.0 * self.m * self.K)


def propagator(sys: LinearSystem, tau: float) -> np.ndarray:
    """exp(A * tau) from the eigenstructure closed form of the active regime."""
    _require_finite(tau=tau)
    if tau < 0.0:
        raise DomainError("propagation time must be non-negative")
    A = sys.A
    eye = np.eye(2)
    sigma = (sys.d + sys.D) / (2.0 * sys.m)
    disc = sys.discriminant
    if abs(disc) < CRITICAL_REL_TOL * (4.0 * sys.m * sys.K):
        # real double pole at -sigma
        return math.exp(-sigma * tau) * (eye + tau * (A + sigma * eye))
    if disc < 0.0:
        omega_d = math.sqrt(-disc) / (2.0 * sys.m)
        decay = math.exp(-sigma * tau)
        return decay * (math.cos(omega_d * tau) * eye
                        + math.sin(omega_d * tau) / omega_d * (A + sigma * eye))
    # overdamped: split into the two real modes, stable against overflow
    mu = math.sqrt(disc) / (2.0 * sys.m)
    lam1 = -sigma + mu
    lam2 = -sigma - mu
    e1 = math.exp(lam1 * tau)
    e2 = math.exp(lam2 * tau)
    return (e1 * (A - lam2 * eye) - e2 * (A - lam1 * eye)) / (lam1 - lam2)


def exact_state(sys: LinearSystem, x0: MotionState, t: float) -> MotionState:
    """Homogeneous trajectory solution exp(A*(t - t0)) @ (x0, v0) at time t."""
    _require_finite(t=t)
    if t < x0.t:
        raise DomainError(f"t={t} precedes the initial time {x0.t}")
    M = propagator(sys, t - x0.t)
    x = M[0, 0] * x0.x + M[0, 1] * x0.v
    v = M[1, 0] * x0.x + M[1, 1] * x0.v
    return MotionState(t=t, x=x, v=v)


def expm_series(A: np.ndarray, t: float, terms: int = 30) -> np.ndarray:
    """Truncated power series sum_v (A t)^v / v!, the brute-force exponential."""
    At = np.asarray(A, dtype=float) * t
    acc = np.eye(At.shape[0])
    term = np.eye(At.shape[0])
    for v in range(1, terms):
        term = term @ At / v
        acc = acc + term
    return acc


def velocity_jump_target(x0: float, d_true: float, d_hi: float, m: float):
    """Velocity-jump requirement and suggestion at a velocity-axis hit.

    Returns (exact, suggested):
      exact      -x0 * (d_hi - d_true) / (2m), the jump that the true damping
                 would need for the coast to reach the origin;
      suggested  -x0 * d_hi / (2m), the worst-case target the controller uses
                 since only the upper bound is known. |suggested| >= |exact|
                 for every d_true in [0, d_hi].
    """
    _require_finite(x0=x0, d_true=d_true, d_hi=d_hi, m=m)
    if m <= 0.0:
        raise DomainError("mass must be positive")
    exact = -x0 * (d_hi - d_true) / (2.0 * m)
    suggested = -x0 * d_hi / (2.0 * m)
    return exact, suggested

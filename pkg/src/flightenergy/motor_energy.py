"""Electrical power drawn by one BLDC motor and energy over a trajectory.

Per motor, with speed ``w`` and angular acceleration ``a``::

    P = R Tf^2/Kt^2
      + (Tf/Kt)(2 R Df/Kt + Kt) w
      + ((Df/Kt)(R Df/Kt + Kt) + 2 R Tf ktau/Kt^2) w^2
      + (ktau/Kt)(2 R Df/Kt + Kt) w^3
      + (R ktau^2/Kt^2) w^4
      + (R J^2/Kt^2) a^2

The expression is a power (W); trajectory energy is its time integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DroneParams

__all__ = [
    "PowerCoefficients",
    "PowerBreakdown",
    "EnergyReport",
    "power_coefficients",
    "motor_power",
    "motor_power_total",
    "trajectory_energy",
    "trapezoid_weights",
]


@dataclass(frozen=True)
class PowerCoefficients:
    c0: float
    c1: float
    c2: float
    c3: float
    c4: float
    c_acc: float

    def polynomial(self) -> np.ndarray:
        """Coefficients in increasing power of omega."""
        return np.array([self.c0, self.c1, self.c2, self.c3, self.c4])


def power_coefficients(p: DroneParams) -> PowerCoefficients:
    R, Tf, Kt, Df = p.r_winding, p.t_f_friction, p.k_t_motor, p.d_f
    d = p.derived
    kt = d.k_tau
    return PowerCoefficients(
        c0=R * Tf**2 / Kt**2,
        c1=(Tf / Kt) * (2 * R * Df / Kt + Kt),
        c2=(Df / Kt) * (R * Df / Kt + Kt) + 2 * R * Tf * kt / Kt**2,
        c3=(kt / Kt) * (2 * R * Df / Kt + Kt),
        c4=R * kt**2 / Kt**2,
        c_acc=R * d.j_total**2 / Kt**2,
    )


@dataclass(frozen=True)
class PowerBreakdown:
    friction_const: np.ndarray | float
    linear: np.ndarray | float
    quadratic: np.ndarray | float
    cubic: np.ndarray | float
    quartic: np.ndarray | float
    accel: np.ndarray | float
    total: np.ndarray | float


def motor_power(omega, alpha, p: DroneParams) -> PowerBreakdown:
    """Term-by-term power for motor speed ``omega`` (>= 0) and acceleration ``alpha``."""
    omega = np.asarray(omega, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if np.any(omega < 0):
        raise ValueError("motor speed must be non-negative")
    c = power_coefficients(p)
    terms = [
        c.c0 * np.ones(np.broadcast(omega, alpha).shape),
        c.c1 * omega,
        c.c2 * omega**2,
        c.c3 * omega**3,
        c.c4 * omega**4,
        c.c_acc * alpha**2,
    ]
    terms = [np.broadcast_to(t, np.broadcast(omega, alpha).shape) for t in terms]
    total = terms[0] + terms[1] + terms[2] + terms[3] + terms[4] + terms[5]
    if total.ndim == 0:
        return PowerBreakdown(*(float(t) for t in terms), total=float(total))
    return PowerBreakdown(*terms, total=total)


def motor_power_total(omega, alpha, c: PowerCoefficients):
    """Total power only, Horner form. No sign checks; used inside the optimiser."""
    return (((c.c4 * omega + c.c3) * omega + c.c2) * omega + c.c1) * omega + c.c0 + c.c_acc * alpha**2


def trapezoid_weights(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    w = np.zeros_like(t)
    if t.size < 2:
        return w
    h = np.diff(t)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


@dataclass(frozen=True)
class EnergyReport:
    total: float
    per_motor: np.ndarray
    series: np.ndarray  # total electrical power at each sample, W
    per_motor_series: np.ndarray  # (N, n_motors), W


def trajectory_energy(traj, p: DroneParams) -> EnergyReport:
    """Trapezoidal energy integral of all motors' power over ``traj``.

    ``traj`` needs ``t``, ``states`` (motor speeds in the last four columns)
    and ``controls`` (motor accelerations).
    """
    t = np.asarray(traj.t, dtype=float)
    omega = np.clip(np.asarray(traj.states)[:, -4:], 0.0, None)
    alpha = np.asarray(traj.controls)
    per = motor_power(omega, alpha, p).total
    w = trapezoid_weights(t)
    per_motor = w @ per if t.size else np.zeros(omega.shape[1])
    return EnergyReport(float(np.sum(per_motor)), np.asarray(per_motor),
                        per.sum(axis=1), per)

"""Cruise thrust and energy-per-meter (EPM) of a multirotor in level flight.

EPM = (1/eta) (kappa T w / v + 1/2 rho CdA v^2 + kappa2 W^1.5 / v + kappa3 W^0.5 v)
      + P_avio / (eta_c v)

with ``W = m g`` and ``w`` the downwash from :mod:`flightenergy.downwash`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .downwash import DownwashMethod, downwash
from .params import DroneParams

__all__ = [
    "CruiseCondition",
    "EpmBreakdown",
    "EpmCurve",
    "InvalidConditionError",
    "cruise_thrust",
    "epm",
    "epm_curve",
    "epm_total",
    "airspeed_grid",
    "optimal_airspeed",
    "range_curve",
]


class InvalidConditionError(ValueError):
    pass


@dataclass(frozen=True)
class CruiseCondition:
    v_a: float
    theta_path: float = 0.0
    method: DownwashMethod = DownwashMethod.ROOT

    def __post_init__(self):
        object.__setattr__(self, "method", DownwashMethod.parse(self.method))


@dataclass(frozen=True)
class EpmBreakdown:
    """EPM in J/m with its additive parts (the first four are before the 1/eta factor)."""

    total: float
    induced: float
    parasitic: float
    profile: float
    rotor: float
    avionics: float
    thrust: float
    downwash: float


@dataclass(frozen=True)
class EpmCurve:
    """Column-wise EPM breakdown over an airspeed grid."""

    v_a: np.ndarray
    total: np.ndarray
    induced: np.ndarray
    parasitic: np.ndarray
    profile: np.ndarray
    rotor: np.ndarray
    avionics: np.ndarray
    thrust: np.ndarray
    downwash: np.ndarray

    COLUMNS = ("v_a", "total", "induced", "parasitic", "profile", "rotor",
               "avionics", "thrust", "downwash")

    def rows(self):
        return np.column_stack([getattr(self, c) for c in self.COLUMNS])


def cruise_thrust(c, p: DroneParams):
    """Total thrust in steady cruise at airspeed ``c.v_a`` and path angle ``c.theta_path``.

    ``c`` may also be a bare airspeed (scalar or array), taken at zero path angle.
    """
    v_a, theta = (c.v_a, c.theta_path) if isinstance(c, CruiseCondition) else (c, 0.0)
    d = p.derived
    drag = 0.5 * p.rho * d.cda_sum * np.square(v_a)
    radicand = d.weight**2 + drag**2 + 2.0 * drag * d.weight * math.sin(theta)
    if np.any(radicand < 0):
        raise InvalidConditionError(f"negative thrust radicand at v_a={v_a!r}, theta={theta!r}")
    T = np.sqrt(radicand)
    return float(T) if np.ndim(T) == 0 else T


def _terms(v_a, T, w, p):
    d = p.derived
    induced = p.kappa * T * w / v_a
    parasitic = 0.5 * p.rho * d.cda_sum * v_a**2
    profile = p.kappa2 * d.weight**1.5 / v_a
    rotor = p.kappa3 * d.weight**0.5 * v_a
    avionics = p.p_avio / (p.eta_c * v_a)
    total = (induced + parasitic + profile + rotor) / p.eta + avionics
    return total, induced, parasitic, profile, rotor, avionics


def epm(c: CruiseCondition, p: DroneParams) -> EpmBreakdown:
    if not c.v_a > 0:
        raise InvalidConditionError(f"EPM requires positive airspeed, got {c.v_a!r}")
    T = cruise_thrust(c, p)
    w = downwash(c.method, T, c.v_a, p)
    parts = _terms(c.v_a, T, w, p)
    return EpmBreakdown(*(float(x) for x in parts), thrust=float(T), downwash=float(w))


def epm_curve(v_a, p: DroneParams, method=DownwashMethod.ROOT, theta_path: float = 0.0) -> EpmCurve:
    """Vectorised :func:`epm` over an array of airspeeds."""
    v = np.atleast_1d(np.asarray(v_a, dtype=float))
    if np.any(v <= 0):
        raise InvalidConditionError("EPM requires positive airspeed on the whole grid")
    d = p.derived
    drag = 0.5 * p.rho * d.cda_sum * v**2
    radicand = d.weight**2 + drag**2 + 2.0 * drag * d.weight * math.sin(theta_path)
    if np.any(radicand < 0):
        raise InvalidConditionError("negative thrust radicand on the grid")
    T = np.sqrt(radicand)
    w = np.asarray(downwash(method, T, v, p), dtype=float) * np.ones_like(v)
    total, induced, parasitic, profile, rotor, avionics = _terms(v, T, w, p)
    return EpmCurve(v, total, induced, parasitic, profile, rotor,
                    avionics * np.ones_like(v), T, w)


def epm_total(v_a: float, p: DroneParams, method=DownwashMethod.ROOT) -> float:
    """Scalar EPM total; the hot path of the airspeed regulator."""
    return epm(CruiseCondition(v_a, 0.0, method), p).total


def airspeed_grid(v_min: float = 0.01, v_max: float = 25.0, step: float = 0.01) -> np.ndarray:
    if not (0 < v_min <= v_max and step > 0):
        raise ValueError(f"invalid airspeed grid ({v_min}, {v_max}, {step})")
    n = int(math.floor((v_max - v_min) / step + 1e-9)) + 1
    return v_min + step * np.arange(n)


def optimal_airspeed(p: DroneParams, method=DownwashMethod.ROOT, v_grid=None):
    """Grid-scan minimiser of EPM; ties resolve to the smaller airspeed.

    Returns ``(v_star, epm_star)``.
    """
    v = airspeed_grid() if v_grid is None else np.asarray(v_grid, dtype=float)
    if v.size == 0:
        raise ValueError("empty airspeed grid")
    curve = epm_curve(v, p, method)
    i = int(np.argmin(curve.total))  # argmin returns the first occurrence
    return float(v[i]), float(curve.total[i])


def range_curve(p: DroneParams, method, battery_energy: float, v_grid=None):
    """Range ``battery_energy / EPM(v)`` in metres over the grid.

    ``battery_energy`` is the usable energy in joules; no battery-sizing rule is
    applied here.
    """
    if not battery_energy > 0:
        raise ValueError("battery_energy must be positive")
    v = airspeed_grid() if v_grid is None else np.asarray(v_grid, dtype=float)
    curve = epm_curve(v, p, method)
    return np.column_stack([v, battery_energy / curve.total])

"""Rotor downwash (induced velocity) under three momentum-theory approximations.

Root
    positive real root of the forward-flight quartic
    ``w^4 + 2 v sin(a) w^3 + v^2 w^2 - (T / (2 n rho s))^2 = 0``.
Hover
    ``sqrt((T/n) / (2 rho A))``, independent of airspeed.
Glauert
    ``(T/n) / (2 rho A v)``, singular at ``v = 0``.

Hover and Glauert use the per-rotor thrust share ``T/n`` and the per-rotor disk
area ``A = pi r^2`` so that all three describe the same single rotor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .params import DroneParams

__all__ = [
    "DownwashMethod",
    "QuarticSolution",
    "DownwashDomainError",
    "angle_of_attack",
    "solve_root_downwash",
    "root_downwash",
    "root_downwash_array",
    "hover_downwash",
    "glauert_downwash",
    "downwash",
]

_MAX_NEWTON = 100
_EPS = np.finfo(float).eps


class DownwashMethod(str, enum.Enum):
    ROOT = "root"
    HOVER = "hover"
    GLAUERT = "glauert"

    @classmethod
    def parse(cls, value) -> "DownwashMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown downwash method {value!r}; expected one of "
                             f"{[m.value for m in cls]}") from None


class DownwashDomainError(ValueError):
    """The requested approximation is undefined at this operating point."""


@dataclass(frozen=True)
class QuarticSolution:
    root: float
    residual: float  # normalised by (T / (2 n rho s))^2
    iterations: int
    all_real_roots: tuple[float, ...]
    method: str = "newton"


def angle_of_attack(v_a, p: DroneParams):
    """Body angle of attack from the drag-to-weight ratio (works on arrays)."""
    d = p.derived
    return np.arctan(0.5 * p.rho * d.cda_sum * np.square(v_a) / d.weight)


def _quartic_coeffs(T, v_a, alpha, p):
    c = T / (2.0 * p.n_rotors * p.rho * p.sigma_disk)
    return 2.0 * v_a * math.sin(alpha), v_a * v_a, c * c


def _quartic(w, b3, b2, c2):
    return ((w + b3) * w + b2) * w * w - c2


def _quartic_prime(w, b3, b2):
    return (4.0 * w + 3.0 * b3) * w * w + 2.0 * b2 * w


def _bisect(b3, b2, c2, lo, hi, max_iter=200):
    flo = _quartic(lo, b3, b2, c2)
    it = 0
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        fm = _quartic(mid, b3, b2, c2)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 4 * _EPS * hi:
            break
    return 0.5 * (lo + hi), it


def _newton(b3, b2, c2):
    """Newton-Raphson from the hover value; returns (w, iterations, converged)."""
    w = math.sqrt(math.sqrt(c2))
    for it in range(1, _MAX_NEWTON + 1):
        fp = _quartic_prime(w, b3, b2)
        if not fp > 0:
            return w, it, False
        step = _quartic(w, b3, b2, c2) / fp
        w_new = w - step
        if not w_new > 0:
            return w, it, False
        if abs(step) <= 4 * _EPS * w_new:
            return w_new, it, True
        w = w_new
    return w, _MAX_NEWTON, False


def _solve(T, v_a, alpha, p):
    if not T > 0:
        raise DownwashDomainError(f"thrust must be positive, got {T!r}")
    if v_a < 0:
        raise DownwashDomainError(f"airspeed must be non-negative, got {v_a!r}")
    b3, b2, c2 = _quartic_coeffs(T, v_a, alpha, p)
    w, it, ok = _newton(b3, b2, c2)
    method = "newton"
    if not ok:
        w, it = _bisect(b3, b2, c2, 1e-6, 10.0 * math.sqrt(math.sqrt(c2)))
        method = "bisection"
    return w, it, method, (b3, b2, c2)


def solve_root_downwash(T: float, v_a: float, alpha: float, p: DroneParams) -> QuarticSolution:
    """Solve the forward-flight quartic for the positive downwash root.

    Newton-Raphson starts at the hover value ``sqrt(T / (2 n rho s))``, which lies
    to the right of the root; the quartic is convex for ``w > 0`` so the iterates
    decrease monotonically. Bisection on ``[1e-6, 10 w0]`` is the fallback.
    """
    w, it, method, (b3, b2, c2) = _solve(T, v_a, alpha, p)
    residual = _quartic(w, b3, b2, c2) / c2
    roots = np.roots([1.0, b3, b2, 0.0, -c2])
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots))].real
    return QuarticSolution(float(w), float(residual), it, tuple(sorted(float(r) for r in real)), method)


def root_downwash(T: float, v_a: float, p: DroneParams) -> float:
    """Scalar Root downwash with the angle of attack computed from ``v_a``."""
    d = p.derived
    alpha = math.atan(0.5 * p.rho * d.cda_sum * v_a * v_a / d.weight)
    return _solve(T, v_a, alpha, p)[0]


def root_downwash_array(T, v_a, p: DroneParams, n_iter: int = 60):
    """Vectorised Root downwash over arrays of thrust and airspeed.

    Same Newton iteration as :func:`solve_root_downwash`, run for a fixed number
    of sweeps (the iterates stop moving once converged).
    """
    T, v_a = np.broadcast_arrays(np.asarray(T, float), np.asarray(v_a, float))
    alpha = angle_of_attack(v_a, p)
    c = T / (2.0 * p.n_rotors * p.rho * p.sigma_disk)
    b3 = 2.0 * v_a * np.sin(alpha)
    b2 = v_a * v_a
    c2 = c * c
    w = np.sqrt(c)
    for _ in range(n_iter):
        w_new = w - _quartic(w, b3, b2, c2) / _quartic_prime(w, b3, b2)
        if np.array_equal(w_new, w):
            break
        w = w_new
    return w


def hover_downwash(T, p: DroneParams):
    if np.any(np.asarray(T) <= 0):
        raise DownwashDomainError("thrust must be positive")
    return np.sqrt((T / p.n_rotors) / (2.0 * p.rho * p.derived.a_disk))


def glauert_downwash(T, v_a, p: DroneParams):
    if np.any(np.asarray(T) <= 0):
        raise DownwashDomainError("thrust must be positive")
    if np.any(np.asarray(v_a) <= 0):
        raise DownwashDomainError("Glauert downwash is singular at zero airspeed")
    return (T / p.n_rotors) / (2.0 * p.rho * p.derived.a_disk * v_a)


def downwash(method, T, v_a, p: DroneParams):
    """Dispatch to the selected approximation; scalars in, float out."""
    method = DownwashMethod.parse(method)
    if method is DownwashMethod.ROOT:
        if np.ndim(T) or np.ndim(v_a):
            return root_downwash_array(T, v_a, p)
        return root_downwash(float(T), float(v_a), p)
    if method is DownwashMethod.HOVER:
        w = hover_downwash(T, p) + np.zeros(np.shape(v_a))
    else:
        w = glauert_downwash(T, v_a, p)
    return float(w) if np.ndim(w) == 0 else w

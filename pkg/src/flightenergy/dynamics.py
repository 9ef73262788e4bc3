"""Quadrotor rigid-body model: 16 states, 4 motor-acceleration inputs.

State layout (``STATE_NAMES``)::

    x y z  vx vy vz  phi theta psi  phidot thetadot psidot  omega1..omega4

z points up. Motors 1 and 3 spin anti-clockwise, 2 and 4 clockwise. The
vertical equation multiplies g by ``tanh(k |dx|^2 / 2)`` (equal to
``2 / (1 + exp(-k |dx|^2)) - 1``) when the landing incentive is active, so
gravity fades out as the vehicle reaches its target.

The right-hand side is written once against an array namespace (``numpy`` or
``jax.numpy``) so the optimiser can differentiate exactly what the simulator
integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .params import DroneParams

__all__ = [
    "STATE_NAMES",
    "CONTROL_NAMES",
    "N_STATES",
    "N_CONTROLS",
    "QuadState",
    "GravityMode",
    "ModelConstants",
    "MotorForces",
    "Trajectory",
    "IntegrationError",
    "model_constants",
    "motor_forces",
    "gravity_multiplier",
    "rhs",
    "derivative",
    "hover_state",
    "integrate",
]

STATE_NAMES = (
    "x", "y", "z", "vx", "vy", "vz", "phi", "theta", "psi",
    "phidot", "thetadot", "psidot", "omega1", "omega2", "omega3", "omega4",
)
CONTROL_NAMES = ("alpha1", "alpha2", "alpha3", "alpha4")
N_STATES = len(STATE_NAMES)
N_CONTROLS = len(CONTROL_NAMES)
IDX = {name: i for i, name in enumerate(STATE_NAMES)}
OMEGA = slice(12, 16)


@dataclass(frozen=True)
class QuadState:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0
    phidot: float = 0.0
    thetadot: float = 0.0
    psidot: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    omega3: float = 0.0
    omega4: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in STATE_NAMES], dtype=float)

    @classmethod
    def from_array(cls, a) -> "QuadState":
        a = np.asarray(a, dtype=float)
        if a.shape != (N_STATES,):
            raise ValueError(f"expected {N_STATES} state components, got shape {a.shape}")
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class GravityMode:
    """``standard`` uses plain g; ``incentivized`` fades g near ``target``."""

    incentivized: bool = False
    target: tuple[float, float, float] = (0.0, 0.0, 0.0)
    k_decay: float = 3.0

    def __post_init__(self):
        if self.incentivized and not self.k_decay > 0:
            raise ValueError("k_decay must be positive for the landing incentive")
        object.__setattr__(self, "target", tuple(float(v) for v in self.target))

    @classmethod
    def standard(cls) -> "GravityMode":
        return cls(False)

    @classmethod
    def landing(cls, target, k_decay: float = 3.0) -> "GravityMode":
        return cls(True, tuple(target), k_decay)

    @property
    def name(self) -> str:
        return "incentivized" if self.incentivized else "standard"


class ModelConstants(NamedTuple):
    """Flat numeric constants consumed by :func:`rhs`."""

    m: float
    g: float
    k_b: float
    k_tau: float
    l: float
    i_x: float
    i_y: float
    i_z: float
    j: float
    drag: float  # cd1 * rho * a1
    k_decay: float
    target: tuple
    incentivized: bool


def model_constants(p: DroneParams, mode: GravityMode | None = None) -> ModelConstants:
    d = p.derived
    mode = mode or GravityMode.standard()
    return ModelConstants(
        m=d.m_total, g=p.g, k_b=d.k_b, k_tau=d.k_tau, l=p.l_arm,
        i_x=p.i_x, i_y=p.i_y, i_z=p.i_z, j=d.j_total, drag=d.body_drag,
        k_decay=mode.k_decay, target=mode.target, incentivized=mode.incentivized,
    )


class MotorForces(NamedTuple):
    F: np.ndarray
    M: np.ndarray
    T: np.ndarray | float
    omega_bar: np.ndarray | float


def motor_forces(s, p: DroneParams) -> MotorForces:
    s = np.asarray(s, dtype=float)
    d = p.derived
    w = s[..., OMEGA]
    F = d.k_b * w**2
    M = d.k_tau * w**2
    return MotorForces(F, M, F.sum(axis=-1), w[..., 0] - w[..., 1] + w[..., 2] - w[..., 3])


def gravity_multiplier(dist2, k_decay: float, xp=np):
    """``2 / (1 + exp(-k d^2)) - 1`` evaluated stably as ``tanh(k d^2 / 2)``."""
    return xp.tanh(0.5 * k_decay * dist2)


def rhs(s, u, c: ModelConstants, xp=np):
    """State derivative for states ``s[..., 16]`` and inputs ``u[..., 4]``."""
    x, y, z = s[..., 0], s[..., 1], s[..., 2]
    vx, vy, vz = s[..., 3], s[..., 4], s[..., 5]
    phi, theta, psi = s[..., 6], s[..., 7], s[..., 8]
    p_, q_, r_ = s[..., 9], s[..., 10], s[..., 11]
    w1, w2, w3, w4 = s[..., 12], s[..., 13], s[..., 14], s[..., 15]

    F1, F2, F3, F4 = c.k_b * w1**2, c.k_b * w2**2, c.k_b * w3**2, c.k_b * w4**2
    T = F1 + F2 + F3 + F4
    torque_yaw = c.k_tau * (w1**2 - w2**2 + w3**2 - w4**2)
    omega_bar = w1 - w2 + w3 - w4

    cphi, sphi = xp.cos(phi), xp.sin(phi)
    cth, sth = xp.cos(theta), xp.sin(theta)
    cpsi, spsi = xp.cos(psi), xp.sin(psi)
    kd = 0.5 * c.drag / c.m

    if c.incentivized:
        d2 = (c.target[0] - x) ** 2 + (c.target[1] - y) ** 2 + (c.target[2] - z) ** 2
        g_eff = c.g * gravity_multiplier(d2, c.k_decay, xp)
    else:
        g_eff = c.g

    ax = T / c.m * (cphi * sth * cpsi + sphi * spsi) - kd * vx * xp.abs(vx)
    ay = T / c.m * (cphi * sth * spsi - sphi * cpsi) - kd * vy * xp.abs(vy)
    az = T / c.m * (cphi * cth) - g_eff - kd * vz * xp.abs(vz)

    pdd = (c.i_y - c.i_z) / c.i_x * q_ * r_ + (F2 - F4) * c.l / c.i_x - c.j * q_ * omega_bar / c.i_x
    qdd = (c.i_z - c.i_x) / c.i_y * p_ * r_ + (F3 - F1) * c.l / c.i_y + c.j * p_ * omega_bar / c.i_y
    rdd = (c.i_x - c.i_y) / c.i_z * p_ * q_ + torque_yaw / c.i_z

    return xp.stack(
        [vx, vy, vz, ax, ay, az, p_, q_, r_, pdd, qdd, rdd,
         u[..., 0], u[..., 1], u[..., 2], u[..., 3]],
        axis=-1,
    )


def derivative(s, u, mode: GravityMode, p: DroneParams) -> np.ndarray:
    """Numpy state derivative; accepts single states or stacks of them."""
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    return rhs(s, u, model_constants(p, mode), np)


def hover_state(p: DroneParams, position=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Level hover at ``position`` with every motor at the hover speed."""
    s = np.zeros(N_STATES)
    s[0:3] = position
    s[OMEGA] = p.derived.omega_hover
    return s


class IntegrationError(RuntimeError):
    pass


@dataclass
class Trajectory:
    """Sampled trajectory: ``states`` is (N, 16), ``controls`` is (N, 4)."""

    t: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    clamp_events: list = field(default_factory=list)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        self.controls = np.asarray(self.controls, dtype=float)
        if self.states.shape != (self.t.size, N_STATES):
            raise ValueError(f"states must be ({self.t.size}, {N_STATES}), got {self.states.shape}")
        if self.controls.shape != (self.t.size, N_CONTROLS):
            raise ValueError(f"controls must be ({self.t.size}, {N_CONTROLS}), got {self.controls.shape}")

    def __len__(self):
        return self.t.size

    def column(self, name: str) -> np.ndarray:
        return self.states[:, IDX[name]]

    @property
    def position(self) -> np.ndarray:
        return self.states[:, 0:3]

    @property
    def velocity(self) -> np.ndarray:
        return self.states[:, 3:6]

    @property
    def omega(self) -> np.ndarray:
        return self.states[:, OMEGA]


def _control_fn(controls, dt, t0):
    if callable(controls):
        return controls, None
    u = np.asarray(controls, dtype=float)
    if u.ndim != 2 or u.shape[1] != N_CONTROLS:
        raise ValueError(f"controls must be (n_steps, {N_CONTROLS})")

    def hold(t):
        k = min(int(math.floor((t - t0) / dt + 1e-9)), u.shape[0] - 1)
        return u[max(k, 0)]

    return hold, u.shape[0]


def integrate(s0, controls, dt: float, mode: GravityMode, p: DroneParams, *,
              t_end: float | None = None, t0: float = 0.0) -> Trajectory:
    """Fixed-step RK4 simulation.

    ``controls`` is either an ``(n_steps, 4)`` array held constant over each step
    or a callable ``u(t) -> (4,)``; a callable needs ``t_end``. Motor speeds are
    clamped to ``[0, omega_max]`` after every step and each clamp is recorded as
    ``(step_index, motor_index, unclamped_value)``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    ufn, n_steps = _control_fn(controls, dt, t0)
    if n_steps is None:
        if t_end is None:
            raise ValueError("t_end is required with a control callable")
        n_steps = int(round((t_end - t0) / dt))
    c = model_constants(p, mode)
    w_max = p.omega_max
    s = np.asarray(s0.to_array() if isinstance(s0, QuadState) else s0, dtype=float).copy()
    states = np.empty((n_steps + 1, N_STATES))
    ctrl = np.empty((n_steps + 1, N_CONTROLS))
    states[0] = s
    clamps = []
    f = lambda st, uu: rhs(st, uu, c, np)  # noqa: E731
    for k in range(n_steps):
        t = t0 + k * dt
        u0 = np.asarray(ufn(t), dtype=float)
        um = np.asarray(ufn(t + 0.5 * dt), dtype=float)
        u1 = np.asarray(ufn(t + dt), dtype=float)
        k1 = f(s, u0)
        k2 = f(s + 0.5 * dt * k1, um)
        k3 = f(s + 0.5 * dt * k2, um)
        k4 = f(s + dt * k3, u1)
        s = s + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(s)):
            raise IntegrationError(f"non-finite state at t={t + dt:.6g} s (step {k + 1})")
        w = s[OMEGA]
        bad = np.flatnonzero((w < 0) | (w > w_max))
        for i in bad:
            clamps.append((k + 1, int(i), float(w[i])))
        s[OMEGA] = np.clip(w, 0.0, w_max)
        states[k + 1] = s
        ctrl[k] = u0
    ctrl[n_steps] = np.asarray(ufn(t0 + n_steps * dt), dtype=float) if n_steps else np.asarray(ufn(t0))
    t = t0 + dt * np.arange(n_steps + 1)
    return Trajectory(t, states, ctrl, clamps)

"""Extremum-seeking airspeed regulation for the cruise phase.

The regulator never sees the plant. Each control period it evaluates the
EPM model at the current airspeed and at ``v_a + delta_v``, forms the
forward-difference gradient, and feeds that gradient through a PID law:

    v_cmd = v_a - (kp * grad + kd * d(grad)/dt + ki * integral(grad))

A positive gradient (EPM rising with speed) slows the vehicle down, and a
negative one speeds it up. The one-sided difference biases the fixed point
by roughly ``delta_v / 2`` below the true optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .downwash import DownwashMethod
from .epm import CruiseCondition, epm
from .params import DroneParams

__all__ = [
    "RegulatorConfig",
    "RegulatorState",
    "RegulatorTrace",
    "AirspeedPlant",
    "epm_gradient",
    "step",
    "simulate",
]


@dataclass(frozen=True)
class RegulatorConfig:
    """Gains and timing of the airspeed regulator.

    The default gains were tuned on the default drone with the default
    first-order plant; they are scenario data, not constants of the method.
    """

    kp: float = 0.5
    ki: float = 0.05
    kd: float = 0.01
    delta_v: float = 0.01
    dt: float = 0.05
    trigger_time: float = 4.0
    anti_windup_limit: float | None = None
    v_cmd_min: float = 0.5
    v_cmd_max: float = 25.0

    def __post_init__(self):
        if not self.kp > 0:
            raise ValueError("kp must be positive")
        if self.ki < 0 or self.kd < 0:
            raise ValueError("ki and kd must be non-negative")
        if not self.delta_v > 0:
            raise ValueError("delta_v must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0 < self.v_cmd_min < self.v_cmd_max:
            raise ValueError("need 0 < v_cmd_min < v_cmd_max")
        if self.anti_windup_limit is not None and not self.anti_windup_limit > 0:
            raise ValueError("anti_windup_limit must be positive")

    @property
    def integral_limit(self) -> float:
        """Clamp on the gradient integral.

        Defaults to ten times the integral that alone commands a 5 m/s change.
        """
        if self.anti_windup_limit is not None:
            return self.anti_windup_limit
        if self.ki == 0:
            return np.inf
        return 10.0 * 5.0 / self.ki


@dataclass(frozen=True)
class RegulatorState:
    v_a: float
    grad_integral: float = 0.0
    prev_grad: float | None = None
    t: float = 0.0


@dataclass(frozen=True)
class AirspeedPlant:
    """First-order airspeed lag ``dv/dt = (v_cmd - v) / tau`` with optional accel limit."""

    tau: float = 0.5
    accel_limit: float | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    def advance(self, v: float, v_cmd: float, dt: float) -> float:
        dv = (v_cmd - v) * -np.expm1(-dt / self.tau)
        if self.accel_limit is not None:
            lim = self.accel_limit * dt
            dv = min(max(dv, -lim), lim)
        return v + dv


@dataclass
class RegulatorTrace:
    t: np.ndarray
    v_a: np.ndarray
    epm: np.ndarray
    grad_epm: np.ndarray
    v_cmd: np.ndarray

    COLUMNS = ("t", "v_a", "epm", "grad_epm", "v_cmd")

    def rows(self) -> np.ndarray:
        return np.column_stack([self.t, self.v_a, self.epm, self.grad_epm, self.v_cmd])

    def tail(self, fraction: float = 0.1) -> "RegulatorTrace":
        k = max(1, int(round(len(self.t) * fraction)))
        return RegulatorTrace(*(getattr(self, c)[-k:] for c in self.COLUMNS))

    def steady_state(self, fraction: float = 0.1) -> tuple[float, float]:
        """Mean airspeed and EPM over the final ``fraction`` of the trace."""
        tail = self.tail(fraction)
        return float(tail.v_a.mean()), float(tail.epm.mean())


def _epm_value(v, p, method):
    return epm(CruiseCondition(v, 0.0, method), p).total


def epm_gradient(v_a: float, delta_v: float, p: DroneParams,
                 method=DownwashMethod.ROOT, *, base: float | None = None) -> float:
    """Forward-difference EPM slope ``(EPM(v + dv) - EPM(v)) / dv`` in (J/m)/(m/s)."""
    if not delta_v > 0:
        raise ValueError("delta_v must be positive")
    if base is None:
        base = _epm_value(v_a, p, method)
    return (_epm_value(v_a + delta_v, p, method) - base) / delta_v


def _control(state: RegulatorState, grad: float, cfg: RegulatorConfig):
    if state.t < cfg.trigger_time:
        return state, state.v_a
    lim = cfg.integral_limit
    integral = min(max(state.grad_integral + grad * cfg.dt, -lim), lim)
    deriv = 0.0 if state.prev_grad is None else (grad - state.prev_grad) / cfg.dt
    v_cmd = state.v_a - (cfg.kp * grad + cfg.kd * deriv + cfg.ki * integral)
    v_cmd = min(max(v_cmd, cfg.v_cmd_min), cfg.v_cmd_max)
    return replace(state, grad_integral=integral, prev_grad=grad), v_cmd


def step(state: RegulatorState, cfg: RegulatorConfig, p: DroneParams,
         method=DownwashMethod.ROOT) -> tuple[RegulatorState, float]:
    """One control period. Returns the updated controller state and the command.

    Before ``cfg.trigger_time`` the command equals the current airspeed and
    the PID memory is left untouched.
    """
    if state.t < cfg.trigger_time:
        return replace(state, t=state.t + cfg.dt), state.v_a
    grad = epm_gradient(state.v_a, cfg.delta_v, p, method)
    new, v_cmd = _control(state, grad, cfg)
    return replace(new, t=state.t + cfg.dt), v_cmd


def simulate(cfg: RegulatorConfig, plant: AirspeedPlant, v0: float, t_end: float,
             p: DroneParams, method=DownwashMethod.ROOT, *,
             param_events: Sequence[tuple[float, DroneParams]] = (),
             noise_std: float = 0.0, seed: int | None = None) -> RegulatorTrace:
    """Closed-loop run of regulator and plant from airspeed ``v0``.

    ``param_events`` swaps the drone parameters at the given times (both the
    regulator's model and the reported EPM use the new set). ``noise_std``
    adds Gaussian noise to the airspeed the regulator measures.
    """
    if not v0 > 0:
        raise ValueError("v0 must be positive")
    if not t_end > cfg.trigger_time:
        raise ValueError("t_end must exceed the trigger time")
    method = DownwashMethod.parse(method)
    rng = np.random.default_rng(seed)
    events = sorted(param_events, key=lambda e: e[0])
    n = int(np.floor(t_end / cfg.dt + 1e-9)) + 1
    out = np.empty((n, 5))
    state = RegulatorState(v_a=v0)
    v_true = v0
    for k in range(n):
        t = k * cfg.dt
        while events and events[0][0] <= t:
            p = events.pop(0)[1]
        v_meas = v_true + (rng.normal(0.0, noise_std) if noise_std > 0 else 0.0)
        v_meas = max(v_meas, 1e-3)
        state = replace(state, v_a=v_meas, t=t)
        e0 = _epm_value(v_meas, p, method)
        grad = epm_gradient(v_meas, cfg.delta_v, p, method, base=e0)
        state, v_cmd = _control(state, grad, cfg)
        out[k] = (t, v_true, _epm_value(v_true, p, method) if noise_std > 0 else e0, grad, v_cmd)
        v_true = plant.advance(v_true, v_cmd, cfg.dt)
    return RegulatorTrace(*(out[:, i].copy() for i in range(5)))

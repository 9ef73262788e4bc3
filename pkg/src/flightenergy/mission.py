"""Whole-route energy budget and the downwash comparison table.

A mission is an ordered list of phases. Takeoff and landing are solved as
minimum-energy trajectories; cruise is charged at the steady-state EPM the
airspeed regulator settles on, times the distance flown. The regulator's
approach transient is reported alongside but not added to the total.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .downwash import DownwashMethod
from .epm import CruiseCondition, airspeed_grid, epm, epm_curve
from .params import DroneParams, default_drone
from .regulator import AirspeedPlant, RegulatorConfig, simulate
from .trajopt import OptStatus, Scenario, solve

__all__ = [
    "TakeoffPhase",
    "CruisePhase",
    "LandingPhase",
    "MissionSpec",
    "MissionError",
    "PhaseReport",
    "MissionReport",
    "run_mission",
    "compare_downwash",
    "DOWNWASH_COLUMNS",
]


class MissionError(RuntimeError):
    """A phase failed; ``phase`` names it and ``status`` carries the solver verdict."""

    def __init__(self, phase: str, message: str, status: OptStatus | None = None):
        super().__init__(f"{phase}: {message}")
        self.phase = phase
        self.status = status


@dataclass(frozen=True)
class TakeoffPhase:
    scenario: Scenario
    nodes: int = 500
    solve_options: dict = field(default_factory=dict)
    name: str = "takeoff"


@dataclass(frozen=True)
class LandingPhase:
    scenario: Scenario
    nodes: int = 500
    solve_options: dict = field(default_factory=dict)
    name: str = "landing"


@dataclass(frozen=True)
class CruisePhase:
    """Level cruise over ``distance`` metres.

    ``entry_speed`` defaults to the speed at the end of a preceding takeoff;
    the regulator runs from there for ``t_end`` seconds.
    """

    distance: float
    regulator: RegulatorConfig = field(default_factory=RegulatorConfig)
    plant: AirspeedPlant = field(default_factory=AirspeedPlant)
    entry_speed: float | None = None
    t_end: float = 60.0
    method: DownwashMethod = DownwashMethod.ROOT
    name: str = "cruise"


Phase = Union[TakeoffPhase, CruisePhase, LandingPhase]


@dataclass(frozen=True)
class MissionSpec:
    phases: tuple
    drone: DroneParams = field(default_factory=default_drone)
    speed_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        self.validate()

    def validate(self) -> None:
        if not self.phases:
            raise ValueError("a mission needs at least one phase")
        for i, ph in enumerate(self.phases):
            if not isinstance(ph, (TakeoffPhase, CruisePhase, LandingPhase)):
                raise ValueError(f"phase {i}: unsupported phase type {type(ph).__name__}")
            if isinstance(ph, CruisePhase):
                if not ph.distance > 0:
                    raise ValueError(f"phase {i} ({ph.name}): cruise distance must be positive")
                prev = self.phases[i - 1] if i else None
                if isinstance(prev, TakeoffPhase) and ph.entry_speed is not None:
                    exit_speed = _exit_speed(prev)
                    if abs(exit_speed - ph.entry_speed) > self.speed_tol:
                        raise ValueError(
                            f"phase {i} ({ph.name}): entry speed {ph.entry_speed} m/s does not "
                            f"match takeoff exit speed {exit_speed} m/s")
                elif ph.entry_speed is None and not isinstance(prev, TakeoffPhase):
                    raise ValueError(f"phase {i} ({ph.name}): entry_speed is required "
                                     "unless a takeoff precedes the cruise")


def _exit_speed(ph: TakeoffPhase) -> float:
    return float(np.linalg.norm(ph.scenario.bc.xf[3:6]))


@dataclass(frozen=True)
class PhaseReport:
    name: str
    energy: float
    duration: float
    distance: float
    status: str
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "energy_J": self.energy, "duration_s": self.duration,
                "distance_m": self.distance, "status": self.status, **self.details}


@dataclass(frozen=True)
class MissionReport:
    phases: tuple

    @property
    def total_energy(self) -> float:
        return float(sum(ph.energy for ph in self.phases))

    @property
    def total_distance(self) -> float:
        return float(sum(ph.distance for ph in self.phases))

    @property
    def total_duration(self) -> float:
        return float(sum(ph.duration for ph in self.phases))

    @property
    def energy_per_meter(self) -> float:
        d = self.total_distance
        return self.total_energy / d if d > 0 else float("nan")

    def as_dict(self) -> dict:
        return {
            "phases": [ph.as_dict() for ph in self.phases],
            "total_energy_J": self.total_energy,
            "total_distance_m": self.total_distance,
            "total_duration_s": self.total_duration,
            "energy_per_meter_J_m": self.energy_per_meter,
        }


def _path_length(pos) -> float:
    return float(np.linalg.norm(np.diff(pos, axis=0), axis=1).sum())


def _run_trajectory(ph, p: DroneParams, trajectories: dict | None) -> PhaseReport:
    nlp = ph.scenario.problem(p, ph.nodes)
    res = solve(nlp, **ph.solve_options)
    if not res.ok:
        raise MissionError(ph.name, f"optimisation ended with status {res.status.value} "
                           f"after {res.iterations} iterations ({res.message})", res.status)
    if trajectories is not None:
        trajectories[ph.name] = res.trajectory
    return PhaseReport(ph.name, res.energy, float(nlp.bc.t_f - nlp.bc.t0),
                       _path_length(res.trajectory.position), res.status.value,
                       {"iterations": res.iterations, "constr_viol": res.constr_viol})


def _run_cruise(ph: CruisePhase, v_entry: float, p: DroneParams) -> PhaseReport:
    if not ph.t_end > ph.regulator.trigger_time:
        raise MissionError(ph.name, "regulator horizon ends before the trigger time")
    trace = simulate(ph.regulator, ph.plant, v_entry, ph.t_end, p, ph.method)
    v_ss, _ = trace.steady_state()
    epm_ss = epm(CruiseCondition(v_ss, 0.0, ph.method), p).total
    # Power is EPM * v, so the transient energy is the time integral of that.
    transient = float(np.trapezoid(trace.epm * trace.v_a, trace.t))
    transient_dist = float(np.trapezoid(trace.v_a, trace.t))
    return PhaseReport(ph.name, epm_ss * ph.distance, ph.distance / v_ss, ph.distance, "steady",
                       {"airspeed_m_s": v_ss, "epm_J_m": epm_ss,
                        "transient_energy_J": transient,
                        "transient_distance_m": transient_dist,
                        "transient_duration_s": float(trace.t[-1] - trace.t[0])})


def run_mission(spec: MissionSpec, *, trajectories: dict | None = None) -> MissionReport:
    """Run the phases in order; the first failing phase aborts with :class:`MissionError`.

    If ``trajectories`` is a dict, solved takeoff/landing trajectories are
    stored in it under the phase name.
    """
    spec.validate()
    p = spec.drone
    reports = []
    for i, ph in enumerate(spec.phases):
        if isinstance(ph, CruisePhase):
            prev = spec.phases[i - 1] if i else None
            v_entry = ph.entry_speed if ph.entry_speed is not None else _exit_speed(prev)
            reports.append(_run_cruise(ph, v_entry, p))
        else:
            reports.append(_run_trajectory(ph, p, trajectories))
    return MissionReport(tuple(reports))


DOWNWASH_COLUMNS = ("v", "w_R", "w_H", "w_G", "EPM_R", "EPM_H", "EPM_G")


def compare_downwash(v_grid: Sequence[float] | None, p: DroneParams,
                     glauert_v_min: float = 1.0) -> np.ndarray:
    """Downwash and EPM under the three approximations, one row per airspeed.

    Columns follow :data:`DOWNWASH_COLUMNS`. The Glauert cells are NaN below
    ``glauert_v_min``, where that approximation blows up.
    """
    v = airspeed_grid(0.5, 25.0, 0.5) if v_grid is None else np.asarray(v_grid, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("airspeed grid must be a non-empty 1-D sequence")
    root = epm_curve(v, p, DownwashMethod.ROOT)
    hover = epm_curve(v, p, DownwashMethod.HOVER)
    w_g = np.full(v.shape, np.nan)
    e_g = np.full(v.shape, np.nan)
    ok = v >= glauert_v_min
    if ok.any():
        gl = epm_curve(v[ok], p, DownwashMethod.GLAUERT)
        w_g[ok], e_g[ok] = gl.downwash, gl.total
    return np.column_stack([v, root.downwash, hover.downwash, w_g, root.total, hover.total, e_g])

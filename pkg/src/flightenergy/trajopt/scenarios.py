"""Reference takeoff and landing problems of a delivery route.

The takeoff climbs from rest on the pad to the corridor entry point (200 m
along track, 200 m up, 11 m/s, pitched 0.3 rad). The landing starts from the
mirrored corridor exit and comes to rest on the destination pad 200 m further
along track.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dynamics import GravityMode, N_STATES, OMEGA
from ..params import DroneParams
from .transcription import BoundaryConditions, NlpProblem, transcribe

__all__ = [
    "Scenario",
    "TAKEOFF_X0",
    "TAKEOFF_XF",
    "LANDING_X0",
    "LANDING_XF",
    "LANDING_TARGET",
    "TAKEOFF_Z_FLOOR",
    "takeoff",
    "landing",
    "corridor_distance",
]

_PAD_OMEGA = 912.32
_CRUISE_OMEGA = 1172.3


def _state(pos=(0.0, 0.0, 0.0), vel=(0.0, 0.0, 0.0), theta=0.0, omega=0.0):
    s = np.zeros(N_STATES)
    s[0:3], s[3:6], s[7] = pos, vel, theta
    s[OMEGA] = omega
    return s


TAKEOFF_X0 = _state(omega=_PAD_OMEGA)
TAKEOFF_XF = _state((200.0, 0.0, 200.0), (11.0, 0.0, 0.0), 0.3, _CRUISE_OMEGA)
LANDING_X0 = _state((5870.21, 0.0, 200.0), (11.0, 0.0, 0.0), 0.3, _CRUISE_OMEGA)
LANDING_XF = _state((6070.21, 0.0, 0.0))
LANDING_TARGET = (6070.21, 0.0, 0.0)

# The pad speed is below hover speed, so the first collocation interval sinks a
# few millimetres at 500 nodes before the motors spin up.
TAKEOFF_Z_FLOOR = -0.01


def corridor_distance() -> float:
    """Along-track distance between the takeoff end point and the landing start."""
    return float(LANDING_X0[0] - TAKEOFF_XF[0])


@dataclass(frozen=True)
class Scenario:
    name: str
    bc: BoundaryConditions
    mode: GravityMode
    options: dict = field(default_factory=dict)

    def problem(self, p: DroneParams, nodes: int = 500) -> NlpProblem:
        return transcribe(self.bc, self.mode, p, nodes, **self.options)

    def with_tf(self, t_f: float) -> "Scenario":
        return Scenario(self.name, self.bc.with_tf(t_f), self.mode, dict(self.options))


def takeoff(t_f: float = 22.0) -> Scenario:
    """Climb to the corridor under standard gravity (the final velocity is nonzero)."""
    bc = BoundaryConditions(TAKEOFF_X0, TAKEOFF_XF, t_f)
    return Scenario("takeoff", bc, GravityMode.standard(), {"z_floor": TAKEOFF_Z_FLOOR})


def landing(t_f: float = 22.0, incentivized: bool = True, k_decay: float = 3.0) -> Scenario:
    """Descent to the pad.

    With standard gravity the motors cannot hold the vehicle on the pad at zero
    speed, so the final motor speeds are left free in that variant.
    """
    if incentivized:
        bc = BoundaryConditions(LANDING_X0, LANDING_XF, t_f)
        return Scenario("landing", bc, GravityMode.landing(LANDING_TARGET, k_decay))
    free = ("omega1", "omega2", "omega3", "omega4")
    bc = BoundaryConditions.from_states(LANDING_X0, LANDING_XF, t_f, free=free)
    return Scenario("landing", bc, GravityMode.standard())

"""Minimum-energy takeoff and landing trajectories by direct collocation."""

from .ipm import IpmOptions, IpmResult, ScaledProblem, solve_nlp
from .scenarios import Scenario, corridor_distance, landing, takeoff
from .solve import OptResult, OptStatus, SweepRow, solve, tf_sweep, touchdown
from .transcription import (ANGLE_LIMIT, BoundaryConditions, InitStrategy, NlpProblem,
                            initial_guess, transcribe)

__all__ = [
    "ANGLE_LIMIT",
    "BoundaryConditions",
    "InitStrategy",
    "IpmOptions",
    "IpmResult",
    "NlpProblem",
    "OptResult",
    "OptStatus",
    "Scenario",
    "ScaledProblem",
    "SweepRow",
    "corridor_distance",
    "initial_guess",
    "landing",
    "solve",
    "solve_nlp",
    "takeoff",
    "tf_sweep",
    "touchdown",
    "transcribe",
]

"""Energy models and minimum-energy trajectory planning for multirotor UAVs."""

from .params import DroneParams, ParamsError, default_drone, load_params
from .downwash import DownwashMethod, downwash, solve_root_downwash
from .epm import CruiseCondition, epm, epm_curve, optimal_airspeed
from .regulator import AirspeedPlant, RegulatorConfig, simulate
from .dynamics import GravityMode, QuadState, Trajectory, integrate
from .motor_energy import motor_power, trajectory_energy

__version__ = "0.1.0"

__all__ = [
    "DroneParams", "ParamsError", "default_drone", "load_params",
    "DownwashMethod", "downwash", "solve_root_downwash",
    "CruiseCondition", "epm", "epm_curve", "optimal_airspeed",
    "AirspeedPlant", "RegulatorConfig", "simulate",
    "GravityMode", "QuadState", "Trajectory", "integrate",
    "motor_power", "trajectory_energy",
]

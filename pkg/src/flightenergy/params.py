"""Drone parameter set: tabulated constants plus the quantities derived from them.

All values are SI. ``DroneParams`` is frozen; use :func:`dataclasses.replace`
(or :meth:`DroneParams.replace`) to build variants.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, fields
from functools import cached_property
from pathlib import Path

__all__ = [
    "DroneParams",
    "DerivedParams",
    "ParamsError",
    "default_drone",
    "derive",
    "load_params",
    "save_params",
    "params_from_mapping",
    "profile_power_factor_from_disk",
]

DRONE_SECTION = "drone"


class ParamsError(ValueError):
    """Raised for unreadable, malformed or physically invalid parameter sets."""


@dataclass(frozen=True)
class DroneParams:
    # environment / efficiencies
    rho: float = 1.225
    g: float = 9.807
    eta: float = 0.7
    eta_c: float = 1.0
    kappa: float = 1.15
    kappa2: float = 0.790
    kappa3: float = 0.0042
    p_avio: float = 0.0
    # battery sizing constants; carried for completeness, unused by any model
    s_batt: float = 540_000.0
    f_safety: float = 1.2
    gamma_doc: float = 0.5
    # geometry
    n_rotors: int = 4
    n_blades: int = 4
    eps_blade_offset: float = 0.004
    m_blade: float = 0.0055
    r_prop: float = 0.127
    sigma_disk: float = 0.0507
    l_arm: float = 0.175
    # masses, drag
    m1: float = 1.07
    m2: float = 1.0
    m3: float = 0.5
    cd1: float = 1.49
    cd2: float = 1.0
    cd3: float = 2.2
    a1: float = 0.0599
    a2: float = 0.0037
    a3: float = 0.0135
    # propeller / inertia
    c_t: float = 0.0048
    c_q: float = 0.00023515
    j_m: float = 4.9e-6
    i_x: float = 0.081
    i_y: float = 0.081
    i_z: float = 0.142
    k_decay: float = 3.0
    # motor
    k_t_motor: float = 0.01038
    t_f_friction: float = 4e-2
    r_winding: float = 0.2
    d_f: float = 2e-4
    omega_max: float = 1200.0

    def __post_init__(self):
        _validate(self)

    def replace(self, **changes) -> "DroneParams":
        return dataclasses.replace(self, **changes)

    @cached_property
    def derived(self) -> "DerivedParams":
        return derive(self)


_POSITIVE = (
    "rho", "g", "r_prop", "sigma_disk", "l_arm", "m1", "m2", "a1", "a2", "a3",
    "c_t", "c_q", "j_m", "i_x", "i_y", "i_z", "k_decay", "k_t_motor",
    "r_winding", "omega_max", "m_blade",
)
_NONNEGATIVE = (
    "m3", "cd1", "cd2", "cd3", "kappa2", "kappa3", "p_avio", "t_f_friction",
    "d_f", "eps_blade_offset", "s_batt", "f_safety", "gamma_doc",
)


def _validate(p: DroneParams) -> None:
    for f in fields(p):
        v = getattr(p, f.name)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParamsError(f"{f.name}: expected a number, got {v!r}")
        if not math.isfinite(v):
            raise ParamsError(f"{f.name}: must be finite, got {v!r}")
    for name in _POSITIVE:
        if not getattr(p, name) > 0:
            raise ParamsError(f"{name}: must be strictly positive, got {getattr(p, name)!r}")
    for name in _NONNEGATIVE:
        if getattr(p, name) < 0:
            raise ParamsError(f"{name}: must be non-negative, got {getattr(p, name)!r}")
    for name in ("eta", "eta_c"):
        v = getattr(p, name)
        if not 0 < v <= 1:
            raise ParamsError(f"{name}: must lie in (0, 1], got {v!r}")
    if p.kappa < 1:
        raise ParamsError(f"kappa: must be >= 1, got {p.kappa!r}")
    for name in ("n_rotors", "n_blades"):
        v = getattr(p, name)
        if int(v) != v or v < 1:
            raise ParamsError(f"{name}: must be a positive integer, got {v!r}")
    if p.eps_blade_offset >= p.r_prop:
        raise ParamsError("eps_blade_offset: must be smaller than r_prop")


@dataclass(frozen=True)
class DerivedParams:
    m_total: float
    weight: float
    a_disk: float
    k_b: float
    k_tau: float
    j_l: float
    j_total: float
    cda_sum: float
    body_drag: float
    omega_hover: float


def derive(p: DroneParams) -> DerivedParams:
    """Evaluate the calculated-parameter formulas for ``p``.

    ``body_drag`` is ``cd1 * rho * a1``, the lumped coefficient of the quadratic
    drag used in the rigid-body equations; ``cda_sum`` is the three-section
    sum used by the cruise model.
    """
    m_total = p.m1 + p.m2 + p.m3
    a_disk = math.pi * p.r_prop**2
    k_b = p.c_t * p.rho * a_disk * p.r_prop**2
    k_tau = p.c_q * p.rho * a_disk * p.r_prop**3
    j_l = 0.25 * p.n_blades * p.m_blade * (p.r_prop - p.eps_blade_offset) ** 2
    weight = m_total * p.g
    return DerivedParams(
        m_total=m_total,
        weight=weight,
        a_disk=a_disk,
        k_b=k_b,
        k_tau=k_tau,
        j_l=j_l,
        j_total=p.j_m + j_l,
        cda_sum=p.cd1 * p.a1 + p.cd2 * p.a2 + p.cd3 * p.a3,
        body_drag=p.cd1 * p.rho * p.a1,
        omega_hover=math.sqrt(weight / (p.n_rotors * k_b)),
    )


def profile_power_factor_from_disk(p: DroneParams) -> float:
    """Profile power factor from the disk-area formula ``sqrt(2 rho A)``.

    This does not reproduce the tabulated ``kappa2 = 0.790``; the cruise model
    uses the tabulated value (``p.kappa2``) and this function is informational.
    """
    return math.sqrt(2.0 * p.rho * math.pi * p.r_prop**2)


def default_drone() -> DroneParams:
    return DroneParams()


_FIELD_TYPES = {f.name: f.type for f in fields(DroneParams)}


def params_from_mapping(values, base: DroneParams | None = None) -> DroneParams:
    """Build parameters from string or numeric overrides; unknown keys are errors."""
    base = base or default_drone()
    changes = {}
    for key, raw in values.items():
        if key not in _FIELD_TYPES:
            raise ParamsError(f"{key}: unknown parameter")
        try:
            if _FIELD_TYPES[key] == "int":
                num = float(raw)
                if num != int(num):
                    raise ValueError
                changes[key] = int(num)
            else:
                changes[key] = float(raw)
        except (TypeError, ValueError):
            raise ParamsError(f"{key}: cannot parse {raw!r} as a number") from None
    return dataclasses.replace(base, **changes)


def read_config(path) -> configparser.ConfigParser:
    """Read an INI-style file; text without a section header counts as ``[drone]``."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ParamsError(f"{path}: no such file") from None
    except OSError as exc:
        raise ParamsError(f"{path}: {exc}") from None
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case
    try:
        cp.read_string(text, source=str(path))
    except configparser.MissingSectionHeaderError:
        try:
            cp.read_string(f"[{DRONE_SECTION}]\n" + text, source=str(path))
        except configparser.Error as exc:
            raise ParamsError(f"{path}: malformed config: {exc}") from None
    except configparser.Error as exc:
        raise ParamsError(f"{path}: malformed config: {exc}") from None
    return cp


def load_params(path) -> DroneParams:
    """Load a drone parameter file; missing keys fall back to the defaults."""
    cp = read_config(path)
    extra = [s for s in cp.sections() if s != DRONE_SECTION]
    if extra and not cp.has_section(DRONE_SECTION):
        raise ParamsError(f"{path}: expected a [{DRONE_SECTION}] section, found {extra}")
    if not cp.has_section(DRONE_SECTION):
        return default_drone()
    return params_from_mapping(dict(cp[DRONE_SECTION]))


def format_params(p: DroneParams) -> str:
    lines = [f"[{DRONE_SECTION}]"]
    for f in fields(p):
        lines.append(f"{f.name} = {getattr(p, f.name)!r}")
    return "\n".join(lines) + "\n"


def save_params(p: DroneParams, path) -> None:
    Path(path).write_text(format_params(p))

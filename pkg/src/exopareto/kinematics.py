"""Exoskeleton configurations and their velocity/torque relationships.

Two actuation layouts assist the hip and knee. The serial ("mono") layout
mounts one actuator per joint, so actuator velocities equal joint
velocities. The parallelogram ("bi") layout grounds both actuators at the
torso; its knee actuator spans hip and knee, which couples the two devices
through a constant linear map

    w_mono = J @ w_bi,      J = [[1, 0], [-1, 1]]

and the transpose map for torques, tau_bi = J.T @ tau_mono. Mechanical
power is invariant under the pair of maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError

# Velocity map bi -> mono and its fixed companions.
J_MAP = np.array([[1.0, 0.0], [-1.0, 1.0]])
J_MAP_T = J_MAP.T.copy()
J_MAP_INV = np.array([[1.0, 0.0], [1.0, 1.0]])  # bi actuator vel from joint vel
J_MAP_INV_T = J_MAP_INV.T.copy()

SWEEP_PEAKS_NM = (30.0, 40.0, 50.0, 60.0, 70.0)
MOTOR_PEAK_NM = 2.0  # direct-drive module peak before gearing
ROTOR_INERTIA_KGM2 = 5.06e-4

_HIP_LABELS = {70.0: "A", 60.0: "B", 50.0: "C", 40.0: "D", 30.0: "E"}
_KNEE_LABELS = {70.0: "a", 60.0: "b", 50.0: "c", 40.0: "d", 30.0: "e"}


class ExoVariant(str, Enum):
    MONO = "mono"
    BI = "bi"
    MONO_KNEE_ON_THIGH = "mono_knee_on_thigh"
    MONO_KNEE_ON_SHANK = "mono_knee_on_shank"

    @property
    def is_bi(self):
        return self is ExoVariant.BI


def variant_from_string(name):
    try:
        return ExoVariant(name)
    except ValueError:
        raise ConfigError(
            f"unknown variant {name!r}; expected one of "
            f"{[v.value for v in ExoVariant]}",
            field="variant",
        )


def torque_label(hip_peak_nm, knee_peak_nm):
    """Two-character grid code: hip 70..30 -> A..E, knee 70..30 -> a..e."""
    try:
        return _HIP_LABELS[float(hip_peak_nm)] + _KNEE_LABELS[float(knee_peak_nm)]
    except KeyError:
        raise DomainError(
            f"peak torques ({hip_peak_nm}, {knee_peak_nm}) are not on the "
            f"{SWEEP_PEAKS_NM} grid; no label defined"
        )


def transmission_ratio(peak_nm):
    """Gear ratio needed to reach the peak torque with the reference motor."""
    if peak_nm <= 0.0:
        raise DomainError("peak torque must be > 0")
    return peak_nm / MOTOR_PEAK_NM


def reflected_inertia(peak_nm):
    """Rotor inertia seen at the joint: rotor * ratio**2."""
    return ROTOR_INERTIA_KGM2 * transmission_ratio(peak_nm) ** 2


# Worn-hardware placement per variant: added mass (kg) and its distance from
# the hip along the leg (m, for the thigh/shank attachments). Waist mass does
# not swing with the leg. The two alternative mono layouts move the knee
# actuation unit (1.5 kg of the standard thigh total) proximally onto the
# thigh or distally onto the shank.
_KNEE_UNIT_MASS_KG = 1.5


@dataclass(frozen=True)
class Placement:
    waist_mass_kg: float
    thigh_mass_kg: float
    thigh_com_m: float
    shank_mass_kg: float
    shank_com_from_knee_m: float


_PLACEMENTS = {
    ExoVariant.BI: Placement(4.5, 1.0, 0.23, 0.9, 0.18),
    ExoVariant.MONO: Placement(3.0, 2.5, 0.30, 0.9, 0.18),
    # Knee unit moved to the upper thigh: same masses, thigh CoM pulled in.
    ExoVariant.MONO_KNEE_ON_THIGH: Placement(3.0, 2.5, 0.16, 0.9, 0.18),
    # Knee unit moved just below the knee: thigh keeps only the cuff mass,
    # shank carries the unit close to its proximal end.
    ExoVariant.MONO_KNEE_ON_SHANK: Placement(
        3.0, 2.5 - _KNEE_UNIT_MASS_KG, 0.23, 0.9 + _KNEE_UNIT_MASS_KG, 0.10
    ),
}


@dataclass(frozen=True)
class ExoDesign:
    """A concrete device: layout, peak torques, and inertial bookkeeping."""

    variant: ExoVariant
    hip_peak_nm: float
    knee_peak_nm: float
    link_upper_m: float = 0.42  # l_A
    link_lower_m: float = 0.43  # l_E + l_D
    rotor_inertia_kgm2: float = ROTOR_INERTIA_KGM2
    placement_override: Placement = None
    label: str = field(default="")

    def __post_init__(self):
        if self.hip_peak_nm < 0.0 or self.knee_peak_nm < 0.0:
            raise DomainError("peak torques must be >= 0")
        if self.link_upper_m <= 0.0 or self.link_lower_m <= 0.0:
            raise ConfigError("link lengths must be > 0", field="lengths")
        if not self.label:
            try:
                object.__setattr__(
                    self, "label", torque_label(self.hip_peak_nm, self.knee_peak_nm)
                )
            except DomainError:
                object.__setattr__(self, "label", "--")

    @property
    def placement(self):
        if self.placement_override is not None:
            return self.placement_override
        return _PLACEMENTS[self.variant]

    @property
    def hip_ratio(self):
        return transmission_ratio(self.hip_peak_nm)

    @property
    def knee_ratio(self):
        return transmission_ratio(self.knee_peak_nm)

    @property
    def hip_reflected_inertia_kgm2(self):
        return self.rotor_inertia_kgm2 * self.hip_ratio**2

    @property
    def knee_reflected_inertia_kgm2(self):
        return self.rotor_inertia_kgm2 * self.knee_ratio**2

    def torque_bounds(self):
        return np.array([self.hip_peak_nm, self.knee_peak_nm])

    def joint_moment_map(self):
        """Columns map actuator torques to (hip, knee, ankle) joint moments.

        Mono actuators act across their own joint only. The bi knee actuator
        spans torso->tibia, so its torque loads hip and knee equally.
        """
        if self.variant.is_bi:
            top = J_MAP_INV_T  # [[1, 1], [0, 1]]
        else:
            top = np.eye(2)
        return np.vstack([top, np.zeros((1, 2))])


def make_design(variant, hip_peak_nm, knee_peak_nm, **kwargs):
    if isinstance(variant, str):
        variant = variant_from_string(variant)
    return ExoDesign(variant=variant, hip_peak_nm=float(hip_peak_nm),
                     knee_peak_nm=float(knee_peak_nm), **kwargs)


# ---------------------------------------------------------------------------
# Velocity/torque maps

def velocity_map(bi_vel):
    """Map bi actuator velocities to mono (joint) velocities: J @ w."""
    return J_MAP @ np.asarray(bi_vel, dtype=float)


def torque_map(mono_tau):
    """Map mono (joint-space) torques to bi actuator torques: J.T @ tau."""
    return J_MAP_T @ np.asarray(mono_tau, dtype=float)


def actuator_velocities(design, gait):
    """(N, 2) actuator velocity series for a design over a gait cycle."""
    joint = np.column_stack([gait.hip_vel_rad_s, gait.knee_vel_rad_s])
    if design.variant.is_bi:
        return joint @ J_MAP_INV.T
    return joint.copy()


# ---------------------------------------------------------------------------
# Forward kinematics of the two-link leg models

def _check_lengths(design):
    if design.link_upper_m <= 0.0 or design.link_lower_m <= 0.0:
        raise ConfigError("link lengths not configured", field="lengths")


def forward_kinematics(design, q_a, q_b):
    """Planar endpoint of the device for configuration angles (q_a, q_b).

    The bi layout keeps the lower link referenced to the torso frame; the
    mono layout chains the second angle off the first.
    """
    _check_lengths(design)
    la, lo = design.link_upper_m, design.link_lower_m
    if design.variant.is_bi:
        x = la * np.cos(q_a) + lo * np.cos(q_b)
        y = la * np.sin(q_a) + lo * np.sin(q_b)
    else:
        x = la * np.cos(q_a) + lo * np.cos(q_a - q_b)
        y = la * np.sin(q_a) + lo * np.sin(q_a - q_b)
    return np.array([x, y])


def fk_jacobian(design, q_a, q_b):
    """2x2 endpoint Jacobian d(x, y)/d(q_a, q_b)."""
    _check_lengths(design)
    la, lo = design.link_upper_m, design.link_lower_m
    if design.variant.is_bi:
        return np.array(
            [
                [-la * np.sin(q_a), -lo * np.sin(q_b)],
                [la * np.cos(q_a), lo * np.cos(q_b)],
            ]
        )
    sab = np.sin(q_a - q_b)
    cab = np.cos(q_a - q_b)
    return np.array(
        [
            [-la * np.sin(q_a) - lo * sab, lo * sab],
            [la * np.cos(q_a) + lo * cab, -lo * cab],
        ]
    )


# ---------------------------------------------------------------------------
# Design file I/O (plain key=value)

def load_design_file(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"design file not found: {path}", path=str(path))
    values = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"design line is not key=value: {raw!r}", path=str(path))
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    for key in ("variant", "hip_peak_nm", "knee_peak_nm"):
        if key not in values:
            raise ConfigError(f"design file missing key {key}", field=key, path=str(path))
    kwargs = {}
    if "link_upper_m" in values:
        kwargs["link_upper_m"] = float(values["link_upper_m"])
    if "link_lower_m" in values:
        kwargs["link_lower_m"] = float(values["link_lower_m"])

    mass_keys = (
        "waist_mass_kg", "thigh_mass_kg", "thigh_com_m",
        "shank_mass_kg", "shank_com_from_knee_m",
    )
    if any(key in values for key in mass_keys):
        variant = variant_from_string(values["variant"])
        base = _PLACEMENTS[variant]
        kwargs["placement_override"] = Placement(
            waist_mass_kg=float(values.get("waist_mass_kg", base.waist_mass_kg)),
            thigh_mass_kg=float(values.get("thigh_mass_kg", base.thigh_mass_kg)),
            thigh_com_m=float(values.get("thigh_com_m", base.thigh_com_m)),
            shank_mass_kg=float(values.get("shank_mass_kg", base.shank_mass_kg)),
            shank_com_from_knee_m=float(
                values.get("shank_com_from_knee_m", base.shank_com_from_knee_m)
            ),
        )
    return make_design(
        values["variant"], float(values["hip_peak_nm"]), float(values["knee_peak_nm"]), **kwargs
    )

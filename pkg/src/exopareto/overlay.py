"""Regeneration credit, worn-mass/inertia penalties, and the net-benefit
factor used for design selection.

The sweep treats devices as massless; these overlays superpose the missing
physics on the finished design points. Added mass raises the metabolic rate
through fixed per-segment coefficients; added rotational inertia raises it
through a linear model in the inertia ratio of the loaded leg. Regeneration
credits a fraction of the negative actuator work against the absolute power
draw. After the overlays the non-dominance filter runs again, since the
penalties can promote or demote grid points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kinematics import ExoVariant
from .pareto import adjust_point, dominance_filter

MAX_REGEN_ETA = 0.65
MUSCLE_TENDON_ETA = 0.41

# Metabolic cost of carrying added mass, W/kg per kg, by segment.
MASS_COEFF_WAIST = 0.045
MASS_COEFF_THIGH = 0.075
MASS_COEFF_SHANK = 0.076

# Linear metabolic scaling in the leg-inertia ratio (loaded vs unloaded).
INERTIA_MODEL_THIGH = (-0.74, 1.81)
INERTIA_MODEL_SHANK = (0.63749, 0.40916)

# Device-location factors: mass beta foot->waist (W/kg), inertia gamma
# foot->thigh (W/(kg*m^2)).
BETA_W_KG = (14.8, 5.6, 5.6, 3.3)
GAMMA_W_KGM2 = (47.22, 27.78, 125.07)


@dataclass(frozen=True)
class OverlayParams:
    regen_eta: float = 0.0
    muscle_tendon_eta: float = MUSCLE_TENDON_ETA
    beta_w_kg: tuple = BETA_W_KG
    gamma_w_kgm2: tuple = GAMMA_W_KGM2

    def __post_init__(self):
        if not 0.0 <= self.regen_eta <= MAX_REGEN_ETA:
            raise DomainError(
                f"regen_eta {self.regen_eta} outside [0, {MAX_REGEN_ETA}]",
                field="regen_eta",
            )
        if self.muscle_tendon_eta <= 0.0:
            raise DomainError("muscle_tendon_eta must be > 0", field="muscle_tendon_eta")
        if len(self.beta_w_kg) != 4 or any(v <= 0 for v in self.beta_w_kg):
            raise DomainError("beta needs 4 positive entries", field="beta")
        if len(self.gamma_w_kgm2) != 3 or any(v <= 0 for v in self.gamma_w_kgm2):
            raise DomainError("gamma needs 3 positive entries", field="gamma")


@dataclass(frozen=True)
class InertiaSpec:
    """Worn masses (kg) and leg-segment inertia additions (kg*m^2) of one
    device, per leg. The foot slot exists for API completeness; no design
    here places hardware on the foot."""

    waist_mass_kg: float = 0.0
    thigh_mass_kg: float = 0.0
    shank_mass_kg: float = 0.0
    foot_mass_kg: float = 0.0
    thigh_inertia_kgm2: float = 0.0
    shank_inertia_kgm2: float = 0.0
    foot_inertia_kgm2: float = 0.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 0.0:
                raise DomainError(f"InertiaSpec field {name} must be >= 0", field=name)

    def masses_foot_to_waist(self):
        return (self.foot_mass_kg, self.shank_mass_kg, self.thigh_mass_kg, self.waist_mass_kg)

    def inertias_foot_to_thigh(self):
        return (self.foot_inertia_kgm2, self.shank_inertia_kgm2, self.thigh_inertia_kgm2)


def spec_for_design(design, thigh_length_m=0.42):
    """Inertial bookkeeping for one device.

    Attachment masses contribute point-mass inertia (m*r^2 about the hip) to
    the slot of the segment that carries them; shank attachments sit
    `thigh_length_m` plus their knee offset from the hip. Each actuator's
    reflected rotor inertia is charged to the slot of the segment its joint
    drives (hip -> thigh, knee -> shank) regardless of where the module
    sits, since gearing, not location, sets it.
    """
    placement = design.placement
    thigh_inertia = (
        placement.thigh_mass_kg * placement.thigh_com_m**2
        + design.hip_reflected_inertia_kgm2
    )
    shank_com_from_hip = thigh_length_m + placement.shank_com_from_knee_m
    shank_inertia = (
        placement.shank_mass_kg * shank_com_from_hip**2
        + design.knee_reflected_inertia_kgm2
    )
    return InertiaSpec(
        waist_mass_kg=placement.waist_mass_kg,
        thigh_mass_kg=placement.thigh_mass_kg,
        shank_mass_kg=placement.shank_mass_kg,
        thigh_inertia_kgm2=thigh_inertia,
        shank_inertia_kgm2=shank_inertia,
    )


def browning_mass_delta(spec):
    """Metabolic penalty of the worn mass, W/kg: waist counted once,
    thigh/shank per leg summed over both legs."""
    per_leg = (
        MASS_COEFF_THIGH * spec.thigh_mass_kg + MASS_COEFF_SHANK * spec.shank_mass_kg
    )
    return MASS_COEFF_WAIST * spec.waist_mass_kg + 2.0 * per_leg


def _inertia_scaling(i_exo, i_unloaded, coeffs, mc_unassisted):
    ratio = (i_exo + i_unloaded) / i_unloaded
    intercept, slope = coeffs
    return (intercept + slope * ratio) * mc_unassisted - mc_unassisted


def browning_inertia_delta(spec, subject, mc_unassisted_w_kg):
    """Metabolic change of the loaded-leg inertia model, W/kg, summed over
    both legs. Note the model's intercepts leave a nonzero value even at
    zero added inertia; `apply_overlays` uses the device-attributable part
    (difference against the zero-inertia baseline)."""
    i_unloaded = subject.unloaded_leg_inertia_kgm2
    if i_unloaded <= 0.0:
        raise DomainError("unloaded leg inertia must be > 0")
    per_leg = _inertia_scaling(
        spec.thigh_inertia_kgm2, i_unloaded, INERTIA_MODEL_THIGH, mc_unassisted_w_kg
    ) + _inertia_scaling(
        spec.shank_inertia_kgm2, i_unloaded, INERTIA_MODEL_SHANK, mc_unassisted_w_kg
    )
    return 2.0 * per_leg


def device_inertia_delta(spec, subject, mc_unassisted_w_kg):
    """Device-attributable inertia penalty: the inertia model evaluated at
    the device spec minus its zero-added-inertia baseline."""
    baseline = browning_inertia_delta(InertiaSpec(), subject, mc_unassisted_w_kg)
    return browning_inertia_delta(spec, subject, mc_unassisted_w_kg) - baseline


def location_factor(a_coeff, subject_mass_kg, mc_unloaded_w_kg, i_unloaded_kgm2):
    """Inertia location factor gamma_i = A_i * m * MC / I, W/(kg*m^2)."""
    if i_unloaded_kgm2 <= 0.0:
        raise DomainError("unloaded leg inertia must be > 0")
    return a_coeff * subject_mass_kg * mc_unloaded_w_kg / i_unloaded_kgm2


def dissipated_power(p_plus, p_minus):
    """Net dissipated power: active only when negative work exceeds
    positive work."""
    return p_minus - p_plus if p_plus < p_minus else 0.0


def maf(p_plus, p_minus, masses_kg, inertias_kgm2, params=None):
    """Net-benefit factor: delivered power converted at muscle-tendon
    efficiency minus the mass and inertia location penalties.

    Follows the published arithmetic verbatim; to report it per kilogram of
    subject, pass mass-normalized m_i and I_j (see `maf_normalized`).
    """
    params = params or OverlayParams()
    if p_plus < 0.0 or p_minus < 0.0:
        raise DomainError("power terms must be >= 0")
    masses = tuple(masses_kg)
    inertias = tuple(inertias_kgm2)
    if len(masses) != 4 or len(inertias) != 3:
        raise DomainError("need 4 mass and 3 inertia slots")
    delivered = (p_plus + dissipated_power(p_plus, p_minus)) / params.muscle_tendon_eta
    mass_term = sum(b * m for b, m in zip(params.beta_w_kg, masses))
    inertia_term = sum(g * i for g, i in zip(params.gamma_w_kgm2, inertias))
    return delivered - mass_term - inertia_term


def maf_normalized(p_plus_w_kg, p_minus_w_kg, spec, subject, params=None):
    """MAF per kg of subject: power terms already mass-normalized, mass and
    inertia slots divided by subject mass."""
    m = subject.mass_kg
    return maf(
        p_plus_w_kg,
        p_minus_w_kg,
        [v / m for v in spec.masses_foot_to_waist()],
        [v / m for v in spec.inertias_foot_to_thigh()],
        params=params,
    )


def regen_adjust(abs_power_w_kg, neg_power_w_kg, regen_eta):
    """Absolute power after crediting regenerated negative work."""
    if not 0.0 <= regen_eta <= MAX_REGEN_ETA:
        raise DomainError(f"regen_eta {regen_eta} outside [0, {MAX_REGEN_ETA}]",
                          field="regen_eta")
    return abs_power_w_kg - regen_eta * neg_power_w_kg


def apply_overlays(points, unassisted_rate_w_kg, subject, params=None, spec_fn=None):
    """Superpose mass/inertia penalties and regeneration on a full design
    grid, then re-filter for non-dominance.

    `spec_fn` maps a design to its InertiaSpec; the default derives it from
    the design's placement and transmission ratios. Returns
    (front, overlaid_points).
    """
    params = params or OverlayParams()
    if unassisted_rate_w_kg <= 0.0:
        raise DomainError("unassisted metabolic rate must be > 0")
    if spec_fn is None:
        def spec_fn(design):
            return spec_for_design(design, thigh_length_m=subject.thigh_length_m)
    overlaid = []
    for point in points:
        spec = spec_fn(point.design)
        penalty = browning_mass_delta(spec) + device_inertia_delta(
            spec, subject, unassisted_rate_w_kg
        )
        if penalty == 0.0:
            new_reduction = point.metabolic_reduction_pct
        else:
            assisted_rate = unassisted_rate_w_kg * (
                1.0 - point.metabolic_reduction_pct / 100.0
            )
            new_reduction = 100.0 * (
                unassisted_rate_w_kg - (assisted_rate + penalty)
            ) / unassisted_rate_w_kg
        new_power = regen_adjust(point.abs_power_w_kg, point.neg_power_w_kg, params.regen_eta)
        overlaid.append(
            adjust_point(
                point,
                metabolic_reduction_pct=new_reduction,
                abs_power_w_kg=new_power,
            )
        )
    return dominance_filter(overlaid), overlaid

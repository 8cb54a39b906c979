"""Planar intersegmental reaction loads on a three-segment leg.

Model and conventions
---------------------
Lab frame: x anterior, y up, moments counterclockwise-positive about z
(viewed from the subject's right). The hip is the chain origin. Segment
axis angles are measured from straight-down:

    psi_thigh = q_hip
    psi_shank = q_hip - q_knee
    psi_foot  = psi_shank + pi/2 + q_ankle

with each segment's center of mass at mid-length. The ground reaction acts
at the foot center of mass (the gait schema carries no center-of-pressure
channel). Linear and angular accelerations come from periodic central
differences of the chain positions/rates, so the loaders' cyclic data stays
consistent and constant (static) inputs differentiate to exactly zero.

A distal-to-proximal force/moment recursion yields the total loads
transmitted across each joint. Device torques enter as a parallel load
path: the reported joint moment is the total transmitted moment minus the
assistance crossing that joint (for the torso-grounded layout the knee
actuator crosses the hip as well, which is what relieves the hip
transmission). Reported moments use each joint's own sign convention
(flexion-positive; dorsiflexion-positive at the ankle); forces are reported
in the lab frame. All outputs are normalized by subject mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .gait import phase_masks

GRAVITY_M_S2 = 9.80665

JOINT_ORDER = ("ankle", "knee", "hip")
COMPONENTS = ("fx_n_kg", "fy_n_kg", "mz_nm_kg")

# Recursion moments are CCW-positive; flip to each joint's own convention.
_MOMENT_SIGN = {"ankle": 1.0, "knee": -1.0, "hip": 1.0}


@dataclass(frozen=True)
class ReactionSeries:
    """Per-joint reaction load trajectories, mass-normalized."""

    pct: np.ndarray
    loads: dict  # {joint: {component: (N,) array}}

    def component(self, joint, component):
        return self.loads[joint][component]


def _periodic_derivative(series, dt):
    """Central difference treating index N-1 as a duplicate of index 0."""
    series = np.asarray(series, dtype=float)
    unique = series[:-1]
    d = (np.roll(unique, -1) - np.roll(unique, 1)) / (2.0 * dt)
    return np.concatenate([d, d[:1]])


def _cross_z(r, f):
    return r[:, 0] * f[:, 1] - r[:, 1] * f[:, 0]


def newton_euler_reactions(gait, subject, sol=None, gravity=GRAVITY_M_S2):
    """Reaction force/moment series at ankle, knee, and hip.

    `sol` supplies device torques whose joint-space assistance is removed
    from the transmitted moments; `None` (or a zero-torque solution) gives
    the unassisted loads.
    """
    n = gait.n_samples
    if sol is not None and sol.n_samples != n:
        raise DataError(
            f"solution grid ({sol.n_samples}) does not match gait grid ({n})"
        )
    dt = gait.dt_s
    mass = subject.mass_kg

    psi_t = gait.hip_angle_rad
    psi_s = gait.hip_angle_rad - gait.knee_angle_rad
    psi_f = psi_s + 0.5 * np.pi + gait.ankle_angle_rad
    w_t = gait.hip_vel_rad_s
    w_s = gait.hip_vel_rad_s - gait.knee_vel_rad_s
    w_f = w_s + gait.ankle_vel_rad_s

    def unit(psi):
        return np.column_stack([np.sin(psi), -np.cos(psi)])

    lt, ls, lf = subject.thigh_length_m, subject.shank_length_m, subject.foot_length_m
    r_knee = lt * unit(psi_t)
    r_ankle = r_knee + ls * unit(psi_s)
    com_t = 0.5 * lt * unit(psi_t)
    com_s = r_knee + 0.5 * ls * unit(psi_s)
    com_f = r_ankle + 0.5 * lf * unit(psi_f)

    def second_derivative(points):
        vel = np.column_stack(
            [_periodic_derivative(points[:, 0], dt), _periodic_derivative(points[:, 1], dt)]
        )
        return np.column_stack(
            [_periodic_derivative(vel[:, 0], dt), _periodic_derivative(vel[:, 1], dt)]
        )

    a_t = second_derivative(com_t)
    a_s = second_derivative(com_s)
    a_f = second_derivative(com_f)
    alpha_t = _periodic_derivative(w_t, dt)
    alpha_s = _periodic_derivative(w_s, dt)
    alpha_f = _periodic_derivative(w_f, dt)

    # Inertia about each segment's own center of mass.
    mt, ms, mf = subject.thigh_mass_kg, subject.shank_mass_kg, subject.foot_mass_kg
    i_t = subject.thigh_inertia_kgm2 - mt * (0.5 * lt) ** 2
    i_s = subject.shank_inertia_kgm2 - ms * (0.5 * ls) ** 2
    i_f = subject.foot_inertia_kgm2 - mf * (0.5 * lf) ** 2

    g_vec = np.array([0.0, -gravity])
    f_grf = np.column_stack([gait.grf_x_n_kg, gait.grf_y_n_kg]) * mass

    # Forces transmitted onto each distal segment from its proximal neighbor.
    r_force_ankle = mf * a_f - mf * g_vec - f_grf
    r_force_knee = ms * a_s - ms * g_vec + r_force_ankle
    r_force_hip = mt * a_t - mt * g_vec + r_force_knee

    m_ankle = i_f * alpha_f - _cross_z(r_ankle - com_f, r_force_ankle)
    m_knee = (
        i_s * alpha_s
        + m_ankle
        - _cross_z(r_knee - com_s, r_force_knee)
        + _cross_z(r_ankle - com_s, r_force_ankle)
    )
    m_hip = (
        i_t * alpha_t
        + m_knee
        - _cross_z(-com_t, r_force_hip)
        + _cross_z(r_knee - com_t, r_force_knee)
    )

    moments = {
        "ankle": _MOMENT_SIGN["ankle"] * m_ankle,
        "knee": _MOMENT_SIGN["knee"] * m_knee,
        "hip": _MOMENT_SIGN["hip"] * m_hip,
    }
    if sol is not None:
        assist = sol.joint_assist_nm()  # (N, 3) hip/knee/ankle, joint convention
        moments["hip"] = moments["hip"] - assist[:, 0]
        moments["knee"] = moments["knee"] - assist[:, 1]
        moments["ankle"] = moments["ankle"] - assist[:, 2]

    forces = {"ankle": r_force_ankle, "knee": r_force_knee, "hip": r_force_hip}
    loads = {}
    for joint in JOINT_ORDER:
        loads[joint] = {
            "fx_n_kg": forces[joint][:, 0] / mass,
            "fy_n_kg": forces[joint][:, 1] / mass,
            "mz_nm_kg": moments[joint] / mass,
        }
    return ReactionSeries(pct=gait.pct.copy(), loads=loads)


def peak_reduction(assisted, unassisted, bounds):
    """Per-phase percent reduction of peak |load|, per joint and component.

    Phases with a zero unassisted peak get None (undefined), not a number.
    """
    masks = phase_masks(unassisted.pct, bounds)
    out = {}
    for joint in JOINT_ORDER:
        out[joint] = {}
        for comp in COMPONENTS:
            series_a = np.abs(assisted.component(joint, comp))
            series_u = np.abs(unassisted.component(joint, comp))
            per_phase = {}
            for name, mask in masks.items():
                if not mask.any():
                    per_phase[name] = None
                    continue
                peak_u = float(series_u[mask].max())
                if peak_u == 0.0:
                    per_phase[name] = None
                    continue
                peak_a = float(series_a[mask].max())
                per_phase[name] = 100.0 * (peak_u - peak_a) / peak_u
            out[joint][comp] = per_phase
    return out

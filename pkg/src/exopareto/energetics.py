"""Metabolic-rate surrogate and device power bookkeeping.

The muscle energy rate surrogate is

    Edot_i(t) = c_act * a_i(t)**2 + max(0, P_mech_i(t)) / m_i

per kilogram of muscle, where P_mech_i is the muscle's joint-power share
(torque contribution times joint velocity). Average muscle power over the
stride is m_i/(t1-t0) * integral(Edot_i); the whole-body rate sums both
legs and divides by subject mass. The activation-heat constant c_act is a
documented fixture (60 W per kg muscle) tuned so that unassisted walking
lands in the usual few-W/kg range; the surrogate keeps the qualitative
mechanism (less activation -> less metabolic cost) while staying cheap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .errors import DomainError

C_ACT_W_PER_KG_MUSCLE = 60.0

ACTUATOR_NAMES = ("hip", "knee")


@dataclass(frozen=True)
class PowerIntegrals:
    """Stride-averaged magnitudes of one power series, W/kg."""

    absolute: float
    positive: float
    negative: float
    max_positive: float


@dataclass(frozen=True)
class EnergyReport:
    gross_metabolic_rate_w_kg: float
    metabolic_reduction_pct: float
    abs_power_w_kg: float
    per_actuator_abs_power_w_kg: dict
    pos_power_w_kg: float
    neg_power_w_kg: float
    max_pos_power_w_kg: float

    def __post_init__(self):
        if self.metabolic_reduction_pct > 100.0 + 1e-12:
            raise DomainError("metabolic reduction cannot exceed 100%")
        if self.abs_power_w_kg + 1e-12 < abs(self.pos_power_w_kg - self.neg_power_w_kg):
            raise DomainError("absolute power below |positive - negative|")

    def to_json_dict(self):
        return asdict(self)

    def write_json(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path


def _trapz_time_average(series, stride_s):
    n = series.shape[0]
    dt = stride_s / (n - 1)
    return float(np.trapezoid(series, dx=dt) / stride_s)


def muscle_metabolic_rate(sol, c_act=C_ACT_W_PER_KG_MUSCLE):
    """Whole-body metabolic rate in W/kg for one AssistSolution."""
    gait = sol.gait
    stride = gait.stride_s
    vel = gait.velocities()  # (N, 3)
    masses = sol.muscles.masses_kg
    caps = sol.muscles.capacity_nm  # (3, M)

    # Joint-power share per muscle: (N, M)
    torque_share = sol.activations[:, None, :] * caps[None, :, :]  # (N, 3, M)
    mech_power = np.einsum("njm,nj->nm", torque_share, vel)
    heat = c_act * sol.activations**2  # per kg muscle

    per_muscle = np.empty(len(masses))
    for i, m in enumerate(masses):
        edot = heat[:, i] + np.maximum(mech_power[:, i], 0.0) / m
        per_muscle[i] = m * _trapz_time_average(edot, stride)

    legs = 2.0
    return float(legs * per_muscle.sum() / sol.subject.mass_kg)


def actuator_power(sol):
    """(N, E) instantaneous actuator power, W/kg of subject mass."""
    return sol.device_torques_nm * sol.actuator_vel_rad_s / sol.subject.mass_kg


def power_integrals(series, stride_s):
    """Stride-averaged absolute/positive/negative power and the peak
    positive sample of one series."""
    series = np.asarray(series, dtype=float)
    pos = np.maximum(series, 0.0)
    neg = np.maximum(-series, 0.0)
    return PowerIntegrals(
        absolute=_trapz_time_average(np.abs(series), stride_s),
        positive=_trapz_time_average(pos, stride_s),
        negative=_trapz_time_average(neg, stride_s),
        max_positive=float(pos.max(initial=0.0)),
    )


def metabolic_reduction(assisted_w_kg, unassisted_w_kg):
    """Percent reduction of the assisted rate relative to unassisted."""
    if unassisted_w_kg <= 0.0:
        raise DomainError("unassisted metabolic rate must be > 0")
    return 100.0 * (unassisted_w_kg - assisted_w_kg) / unassisted_w_kg


def energy_report(sol, unassisted_rate_w_kg=None, c_act=C_ACT_W_PER_KG_MUSCLE,
                  rate_fn=None):
    """Assemble the full report for one solution.

    When `unassisted_rate_w_kg` is omitted the reduction is reported as 0
    (the solution is its own baseline). `rate_fn(sol) -> W/kg` swaps in an
    alternative muscle energy model; the default is the activation-heat
    surrogate.
    """
    if rate_fn is None:
        rate = muscle_metabolic_rate(sol, c_act=c_act)
    else:
        rate = rate_fn(sol)
    reduction = 0.0 if unassisted_rate_w_kg is None else metabolic_reduction(
        rate, unassisted_rate_w_kg
    )

    stride = sol.gait.stride_s
    power = actuator_power(sol)
    per_actuator = {}
    totals = dict(absolute=0.0, positive=0.0, negative=0.0, max_positive=0.0)
    for j in range(power.shape[1]):
        name = ACTUATOR_NAMES[j] if j < len(ACTUATOR_NAMES) else f"actuator_{j}"
        ints = power_integrals(power[:, j], stride)
        per_actuator[name] = ints.absolute
        totals["absolute"] += ints.absolute
        totals["positive"] += ints.positive
        totals["negative"] += ints.negative
        totals["max_positive"] = max(totals["max_positive"], ints.max_positive)

    return EnergyReport(
        gross_metabolic_rate_w_kg=rate,
        metabolic_reduction_pct=reduction,
        abs_power_w_kg=totals["absolute"],
        per_actuator_abs_power_w_kg=per_actuator,
        pos_power_w_kg=totals["positive"],
        neg_power_w_kg=totals["negative"],
        max_pos_power_w_kg=totals["max_positive"],
    )

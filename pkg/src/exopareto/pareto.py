"""Peak-torque sweep and non-dominated filtering.

Bounding the actuators' peak torque caps the device power a design can draw
while the gait kinematics stay fixed, so sweeping the (hip, knee) peak
grid and filtering for non-dominance traces the trade-off between metabolic
reduction (maximized) and average absolute device power (minimized).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .energetics import energy_report, muscle_metabolic_rate
from .errors import DomainError, NumericError
from .kinematics import SWEEP_PEAKS_NM, make_design
from .solver import solve_cycle

FRONT_CSV_COLUMNS = (
    "label",
    "variant",
    "condition",
    "hip_peak_nm",
    "knee_peak_nm",
    "metabolic_reduction_pct",
    "abs_power_w_kg",
    "hip_abs_power_w_kg",
    "knee_abs_power_w_kg",
    "neg_power_w_kg",
    "max_pos_power_w_kg",
)


@dataclass(frozen=True)
class DesignPoint:
    label: str
    design: object
    condition: str
    metabolic_reduction_pct: float
    abs_power_w_kg: float
    hip_abs_power_w_kg: float
    knee_abs_power_w_kg: float
    neg_power_w_kg: float
    max_pos_power_w_kg: float

    @property
    def objectives(self):
        return (self.metabolic_reduction_pct, self.abs_power_w_kg)


@dataclass(frozen=True)
class Front:
    """Non-dominated design points, sorted by power ascending."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "points",
            tuple(sorted(self.points, key=lambda p: (p.abs_power_w_kg, p.metabolic_reduction_pct, p.label))),
        )

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def labels(self):
        return [p.label for p in self.points]


def dominates(p, q):
    """p dominates q: at least as much reduction with at most as much power,
    strictly better in one."""
    rp, wp = p
    rq, wq = q
    return rp >= rq and wp <= wq and (rp > rq or wp < wq)


def dominance_filter(points):
    """Keep the non-dominated points (exact objective ties all kept).

    Sort-based sweep: walk in power-ascending order keeping the points that
    beat the best reduction seen at strictly lower power, taking the
    reduction maximum within each equal-power group. The tests compare this
    against a pairwise brute-force oracle.
    """
    points = list(points)
    if not points:
        raise DomainError("dominance filter needs at least one point")
    order = sorted(
        range(len(points)),
        key=lambda i: (points[i].abs_power_w_kg, -points[i].metabolic_reduction_pct),
    )
    kept = []
    best_reduction = -np.inf
    i = 0
    while i < len(order):
        power = points[order[i]].abs_power_w_kg
        group = []
        while i < len(order) and points[order[i]].abs_power_w_kg == power:
            group.append(order[i])
            i += 1
        group_max = max(points[j].metabolic_reduction_pct for j in group)
        if group_max > best_reduction:
            kept.extend(
                j for j in group if points[j].metabolic_reduction_pct == group_max
            )
            best_reduction = group_max
    return Front(points=tuple(points[j] for j in sorted(kept)))


def sweep(gait, muscles, variant, subject=None, peaks=SWEEP_PEAKS_NM,
          unassisted_rate_w_kg=None, kernel=None):
    """Evaluate the full peak-torque grid for one variant and condition.

    Returns (points, unassisted_rate). Grid cells are solved independently
    and assembled in label order, so the result is deterministic.
    """
    if unassisted_rate_w_kg is None:
        baseline = solve_cycle(gait, muscles, design=None, subject=subject, kernel=kernel)
        unassisted_rate_w_kg = muscle_metabolic_rate(baseline)

    points = []
    for hip_peak in peaks:
        for knee_peak in peaks:
            design = make_design(variant, hip_peak, knee_peak)
            try:
                sol = solve_cycle(gait, muscles, design=design, subject=subject, kernel=kernel)
            except NumericError as err:
                err.detail["hip_peak_nm"] = hip_peak
                err.detail["knee_peak_nm"] = knee_peak
                raise
            report = energy_report(sol, unassisted_rate_w_kg=unassisted_rate_w_kg)
            points.append(
                DesignPoint(
                    label=design.label,
                    design=design,
                    condition=gait.condition,
                    metabolic_reduction_pct=report.metabolic_reduction_pct,
                    abs_power_w_kg=report.abs_power_w_kg,
                    hip_abs_power_w_kg=report.per_actuator_abs_power_w_kg.get("hip", 0.0),
                    knee_abs_power_w_kg=report.per_actuator_abs_power_w_kg.get("knee", 0.0),
                    neg_power_w_kg=report.neg_power_w_kg,
                    max_pos_power_w_kg=report.max_pos_power_w_kg,
                )
            )
    points.sort(key=lambda p: p.label)
    return points, unassisted_rate_w_kg


def write_points_csv(points, path, ndigits=9):
    """Write design points in the front CSV schema (9 significant digits)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = f"%.{ndigits}g"
    lines = [",".join(FRONT_CSV_COLUMNS)]
    for p in points:
        lines.append(
            ",".join(
                [
                    p.label,
                    p.design.variant.value,
                    p.condition,
                    fmt % p.design.hip_peak_nm,
                    fmt % p.design.knee_peak_nm,
                    fmt % p.metabolic_reduction_pct,
                    fmt % p.abs_power_w_kg,
                    fmt % p.hip_abs_power_w_kg,
                    fmt % p.knee_abs_power_w_kg,
                    fmt % p.neg_power_w_kg,
                    fmt % p.max_pos_power_w_kg,
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_points_csv(path):
    """Re-load design points written by `write_points_csv`."""
    from .kinematics import variant_from_string  # local to avoid cycle at import

    path = Path(path)
    lines = [l for l in path.read_text(encoding="utf-8").splitlines() if l.strip()]
    header = tuple(lines[0].split(","))
    if header != FRONT_CSV_COLUMNS:
        raise DomainError(f"unexpected front CSV header in {path}")
    points = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        design = make_design(
            variant_from_string(row["variant"]),
            float(row["hip_peak_nm"]),
            float(row["knee_peak_nm"]),
        )
        points.append(
            DesignPoint(
                label=row["label"],
                design=design,
                condition=row["condition"],
                metabolic_reduction_pct=float(row["metabolic_reduction_pct"]),
                abs_power_w_kg=float(row["abs_power_w_kg"]),
                hip_abs_power_w_kg=float(row["hip_abs_power_w_kg"]),
                knee_abs_power_w_kg=float(row["knee_abs_power_w_kg"]),
                neg_power_w_kg=float(row["neg_power_w_kg"]),
                max_pos_power_w_kg=float(row["max_pos_power_w_kg"]),
            )
        )
    return points


def adjust_point(point, **changes):
    return replace(point, **changes)

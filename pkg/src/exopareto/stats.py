"""Trajectory comparison statistics: phase-wise RMSE, peak-to-peak
difference, and median/IQR aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError
from .gait import phase_masks


@dataclass(frozen=True)
class PhaseStats:
    """RMSE and percent peak-to-peak difference of two series, whole-cycle
    and per gait phase. Phases where the reference has zero span carry None
    for the peak-to-peak entry."""

    rmse_total: float
    rmse_per_phase: dict
    ptp_diff_pct_per_phase: dict

    def to_json_dict(self):
        return {
            "rmse_total": self.rmse_total,
            "rmse_per_phase": dict(self.rmse_per_phase),
            "ptp_diff_pct_per_phase": dict(self.ptp_diff_pct_per_phase),
        }


def rmse_per_phase(a, b, pct, bounds):
    """Compare series `b` against reference `a` on a shared percent grid."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pct = np.asarray(pct, dtype=float)
    if a.shape != b.shape or a.shape != pct.shape:
        raise DataError("series and grid must share one shape")

    diff = a - b
    masks = phase_masks(pct, bounds)
    rmse = {}
    ptp = {}
    for name, mask in masks.items():
        if not mask.any():
            rmse[name] = None
            ptp[name] = None
            continue
        rmse[name] = float(np.sqrt(np.mean(diff[mask] ** 2)))
        span_a = float(np.ptp(a[mask]))
        if span_a == 0.0:
            ptp[name] = None
        else:
            span_b = float(np.ptp(b[mask]))
            ptp[name] = 100.0 * (span_a - span_b) / span_a
    return PhaseStats(
        rmse_total=float(np.sqrt(np.mean(diff**2))),
        rmse_per_phase=rmse,
        ptp_diff_pct_per_phase=ptp,
    )


def median_iqr(values):
    """Median and interquartile range with linear-interpolation quartiles."""
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        raise DomainError("median_iqr needs at least one value")
    q1, q2, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    return float(q2), float(q3 - q1)

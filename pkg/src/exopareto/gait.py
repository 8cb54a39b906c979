"""Gait-cycle trajectories, subject anthropometry, and gait phases.

Conventions used throughout the package:

* one stride is sampled on a fixed percent grid 0..100 (inclusive, default
  101 points, so first and last samples describe the same cycle instant);
* sagittal angles are flexion-positive at the hip and knee and
  dorsiflexion-positive at the ankle; velocities and net moments follow the
  same sign convention;
* net joint moments and ground reaction forces are normalized by subject
  mass (N*m/kg and N/kg).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError, FormatError, SchemaError

DEFAULT_SAMPLES = 101

GAIT_COLUMNS = (
    "pct",
    "hip_angle_rad",
    "knee_angle_rad",
    "ankle_angle_rad",
    "hip_vel_rad_s",
    "knee_vel_rad_s",
    "ankle_vel_rad_s",
    "hip_moment_nm_kg",
    "knee_moment_nm_kg",
    "ankle_moment_nm_kg",
    "grf_x_n_kg",
    "grf_y_n_kg",
)

# Accepted alternative: raw (non-normalized) moment columns. They are divided
# by the sidecar's subject_mass_kg on load.
RAW_MOMENT_COLUMNS = ("hip_moment_nm", "knee_moment_nm", "ankle_moment_nm")

CONDITIONS = ("noload", "loaded")


@dataclass(frozen=True)
class Subject:
    """Anthropometry of the simulated subject.

    Segment moments of inertia are taken about the segment's proximal joint.
    `unloaded_leg_inertia` is the whole extended leg about the hip, without
    any worn hardware.
    """

    mass_kg: float = 75.0
    height_m: float = 1.75
    thigh_length_m: float = 0.42
    shank_length_m: float = 0.43
    foot_length_m: float = 0.20
    thigh_mass_kg: float = 7.5
    shank_mass_kg: float = 3.5
    foot_mass_kg: float = 1.1
    thigh_inertia_kgm2: float = field(default=0.0)
    shank_inertia_kgm2: float = field(default=0.0)
    foot_inertia_kgm2: float = field(default=0.0)
    unloaded_leg_inertia_kgm2: float = field(default=0.0)

    def __post_init__(self):
        for name in (
            "mass_kg",
            "height_m",
            "thigh_length_m",
            "shank_length_m",
            "foot_length_m",
            "thigh_mass_kg",
            "shank_mass_kg",
            "foot_mass_kg",
        ):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"subject field {name} must be > 0", field=name)
        # Uniform-rod defaults about the proximal joint: m*l^2/3.
        if self.thigh_inertia_kgm2 == 0.0:
            object.__setattr__(
                self, "thigh_inertia_kgm2", self.thigh_mass_kg * self.thigh_length_m**2 / 3.0
            )
        if self.shank_inertia_kgm2 == 0.0:
            object.__setattr__(
                self, "shank_inertia_kgm2", self.shank_mass_kg * self.shank_length_m**2 / 3.0
            )
        if self.foot_inertia_kgm2 == 0.0:
            object.__setattr__(
                self, "foot_inertia_kgm2", self.foot_mass_kg * self.foot_length_m**2 / 3.0
            )
        if self.unloaded_leg_inertia_kgm2 == 0.0:
            object.__setattr__(
                self, "unloaded_leg_inertia_kgm2", self._extended_leg_inertia()
            )
        if self.unloaded_leg_inertia_kgm2 <= 0.0:
            raise DomainError(
                "unloaded_leg_inertia_kgm2 must be > 0", field="unloaded_leg_inertia_kgm2"
            )

    def _extended_leg_inertia(self):
        # Straight leg about the hip; segment CoM at mid-length, foot CoM
        # half a foot-length anterior to the ankle.
        lt, ls, lf = self.thigh_length_m, self.shank_length_m, self.foot_length_m
        i_thigh = self.thigh_inertia_kgm2
        i_shank_com = self.shank_mass_kg * ls**2 / 12.0
        i_shank = i_shank_com + self.shank_mass_kg * (lt + 0.5 * ls) ** 2
        i_foot_com = self.foot_mass_kg * lf**2 / 12.0
        r_foot = math.hypot(lt + ls, 0.5 * lf)
        i_foot = i_foot_com + self.foot_mass_kg * r_foot**2
        return i_thigh + i_shank + i_foot


@dataclass(frozen=True)
class GaitCycle:
    """One stride of joint kinematics/kinetics on the percent grid."""

    pct: np.ndarray
    hip_angle_rad: np.ndarray
    knee_angle_rad: np.ndarray
    ankle_angle_rad: np.ndarray
    hip_vel_rad_s: np.ndarray
    knee_vel_rad_s: np.ndarray
    ankle_vel_rad_s: np.ndarray
    hip_moment_nm_kg: np.ndarray
    knee_moment_nm_kg: np.ndarray
    ankle_moment_nm_kg: np.ndarray
    grf_x_n_kg: np.ndarray
    grf_y_n_kg: np.ndarray
    toe_off_pct: float
    stride_s: float
    condition: str
    subject_mass_kg: float = 75.0

    def __post_init__(self):
        n = self.pct.shape[0]
        for name in GAIT_COLUMNS:
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise DataError(f"column {name} has {arr.shape[0]} samples, expected {n}",
                                column=name)
            if np.isnan(arr).any():
                raise DataError(f"NaN in column {name}", column=name,
                                row=int(np.flatnonzero(np.isnan(arr))[0]))
            object.__setattr__(self, name, np.ascontiguousarray(arr, dtype=float))
        if not (50.0 < self.toe_off_pct < 75.0):
            raise DomainError(f"toe_off_pct {self.toe_off_pct} outside (50, 75)")
        if self.stride_s <= 0.0:
            raise DomainError("stride_s must be > 0")
        if self.condition not in CONDITIONS:
            raise DomainError(f"condition {self.condition!r} not in {CONDITIONS}",
                              field="condition")
        d = np.diff(self.pct)
        if (d <= 0.0).any():
            raise FormatError("percent grid is not strictly increasing",
                              row=int(np.flatnonzero(d <= 0.0)[0] + 1))

    @property
    def n_samples(self):
        return self.pct.shape[0]

    @property
    def dt_s(self):
        return self.stride_s / (self.n_samples - 1)

    def angles(self):
        """(N, 3) hip/knee/ankle angle matrix."""
        return np.column_stack([self.hip_angle_rad, self.knee_angle_rad, self.ankle_angle_rad])

    def velocities(self):
        return np.column_stack([self.hip_vel_rad_s, self.knee_vel_rad_s, self.ankle_vel_rad_s])

    def moments_nm_kg(self):
        return np.column_stack(
            [self.hip_moment_nm_kg, self.knee_moment_nm_kg, self.ankle_moment_nm_kg]
        )


# ---------------------------------------------------------------------------
# Gait phases

PHASE_NAMES = (
    "loading_response",
    "mid_stance",
    "terminal_stance",
    "pre_swing",
    "initial_swing",
    "mid_swing",
    "terminal_swing",
)

# Stance sub-phase boundaries at the reference toe-off of 60%; they are
# rescaled linearly with the actual toe-off. Swing is split into thirds.
_REFERENCE_STANCE_EDGES = (0.0, 10.0, 30.0, 50.0, 60.0)
_REFERENCE_TOE_OFF = 60.0


def phase_bounds(toe_off_pct):
    """Seven contiguous [start, end) phase intervals covering [0, 100).

    Stance sub-phases scale with toe-off; swing is divided into equal thirds
    between toe-off and 100%.
    """
    if not (50.0 < toe_off_pct < 75.0):
        raise DomainError(f"toe_off_pct {toe_off_pct} outside (50, 75)")
    scale = toe_off_pct / _REFERENCE_TOE_OFF
    edges = [e * scale for e in _REFERENCE_STANCE_EDGES]
    swing = 100.0 - toe_off_pct
    edges += [toe_off_pct + swing / 3.0, toe_off_pct + 2.0 * swing / 3.0, 100.0]
    return tuple(
        (name, edges[i], edges[i + 1]) for i, name in enumerate(PHASE_NAMES)
    )


def phase_masks(pct, bounds):
    """Boolean sample masks per phase; pct is wrapped mod 100 so the
    duplicated 100% sample falls in the first phase."""
    wrapped = np.asarray(pct, dtype=float) % 100.0
    return {
        name: (wrapped >= lo) & (wrapped < hi) for name, lo, hi in bounds
    }


# ---------------------------------------------------------------------------
# CSV + sidecar I/O

def _sidecar_path(path):
    path = Path(path)
    return path.with_suffix(".meta")


def _read_sidecar(path):
    meta = {}
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise SchemaError(f"metadata sidecar not found: {sidecar}", path=str(sidecar))
    for raw in sidecar.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"sidecar line is not key=value: {raw!r}", path=str(sidecar))
        key, value = line.split("=", 1)
        meta[key.strip()] = value.strip()
    for key in ("subject_mass_kg", "toe_off_pct", "stride_s", "condition"):
        if key not in meta:
            raise SchemaError(f"sidecar missing key {key}", key=key, path=str(sidecar))
    return meta


def load_gait_csv(path):
    """Load and validate a gait CSV plus its `.meta` sidecar."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"gait file not found: {path}", path=str(path))
    meta = _read_sidecar(path)

    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip()
        names = tuple(h.strip() for h in header.split(","))
        rows = []
        for lineno, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            parts = raw.strip().split(",")
            if len(parts) != len(names):
                raise FormatError(f"row has {len(parts)} fields, expected {len(names)}",
                                  row=lineno - 2, path=str(path))
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise FormatError(f"non-numeric value on line {lineno}",
                                  row=lineno - 2, path=str(path))

    raw_moments = all(c in names for c in RAW_MOMENT_COLUMNS)
    expected = set(GAIT_COLUMNS)
    if raw_moments:
        expected = (expected - {"hip_moment_nm_kg", "knee_moment_nm_kg", "ankle_moment_nm_kg"})
        expected |= set(RAW_MOMENT_COLUMNS)
    for column in sorted(expected):
        if column not in names:
            raise SchemaError(f"missing column {column}", column=column, path=str(path))

    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        raise FormatError("gait file has no data rows", path=str(path))
    cols = {name: data[:, i] for i, name in enumerate(names)}

    for name in names:
        bad = np.flatnonzero(np.isnan(cols[name]))
        if bad.size:
            raise DataError(f"NaN in column {name} at row {bad[0]}",
                            column=name, row=int(bad[0]), path=str(path))

    mass = float(meta["subject_mass_kg"])
    if raw_moments:
        cols["hip_moment_nm_kg"] = cols["hip_moment_nm"] / mass
        cols["knee_moment_nm_kg"] = cols["knee_moment_nm"] / mass
        cols["ankle_moment_nm_kg"] = cols["ankle_moment_nm"] / mass

    return GaitCycle(
        pct=cols["pct"],
        hip_angle_rad=cols["hip_angle_rad"],
        knee_angle_rad=cols["knee_angle_rad"],
        ankle_angle_rad=cols["ankle_angle_rad"],
        hip_vel_rad_s=cols["hip_vel_rad_s"],
        knee_vel_rad_s=cols["knee_vel_rad_s"],
        ankle_vel_rad_s=cols["ankle_vel_rad_s"],
        hip_moment_nm_kg=cols["hip_moment_nm_kg"],
        knee_moment_nm_kg=cols["knee_moment_nm_kg"],
        ankle_moment_nm_kg=cols["ankle_moment_nm_kg"],
        grf_x_n_kg=cols["grf_x_n_kg"],
        grf_y_n_kg=cols["grf_y_n_kg"],
        toe_off_pct=float(meta["toe_off_pct"]),
        stride_s=float(meta["stride_s"]),
        condition=meta["condition"],
        subject_mass_kg=mass,
    )


def write_gait_csv(cycle, path):
    """Write a gait CSV plus sidecar. Values use shortest-round-trip float
    formatting so a load/write cycle is numerically lossless."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [getattr(cycle, name) for name in GAIT_COLUMNS]
    lines = [",".join(GAIT_COLUMNS)]
    for i in range(cycle.n_samples):
        lines.append(",".join(repr(float(col[i])) for col in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = _sidecar_path(path)
    sidecar.write_text(
        "".join(
            f"{k}={v}\n"
            for k, v in (
                ("subject_mass_kg", repr(float(cycle.subject_mass_kg))),
                ("toe_off_pct", repr(float(cycle.toe_off_pct))),
                ("stride_s", repr(float(cycle.stride_s))),
                ("condition", cycle.condition),
            )
        ),
        encoding="utf-8",
    )
    return path


def resample(cycle, n=DEFAULT_SAMPLES):
    """Linear-interpolate a cycle onto a uniform n-point grid."""
    if n < 3:
        raise DomainError("need at least 3 samples")
    if cycle.n_samples == n and np.allclose(cycle.pct, np.linspace(0.0, 100.0, n)):
        return cycle
    grid = np.linspace(0.0, 100.0, n)
    kwargs = {
        name: np.interp(grid, cycle.pct, getattr(cycle, name)) for name in GAIT_COLUMNS[1:]
    }
    return replace(cycle, pct=grid, **kwargs)


# ---------------------------------------------------------------------------
# Synthetic stride generator
#
# Each trajectory is a short harmonic series a0 + sum_k amp*cos(2*pi*k*(s-phase))
# over the cycle fraction s in [0, 1]; velocities are the exact analytic
# derivatives. A seeded +-3% jitter multiplies the amplitudes so different
# seeds give different but equally plausible strides.

_ANGLE_SERIES = {
    # joint: (offset, [(jitter slot, amplitude, harmonic k, phase), ...])
    "hip": (0.02, [(0, 0.40, 1, 0.00), (1, 0.06, 2, 0.12)]),
    "knee": (0.50, [(2, 0.38, 1, 0.72), (3, 0.10, 2, 0.15)]),
    "ankle": (0.00, [(4, 0.10, 1, 0.25), (5, 0.15, 2, 0.60)]),
}

_MOMENT_SERIES = {
    "hip": (0.00, [(6, 0.95, 1, 0.30), (7, 0.25, 2, 0.05)]),
    "knee": (0.05, [(8, 0.45, 1, 0.85), (9, 0.20, 2, 0.42)]),
    # Plantarflexion burst around late stance, near-zero in swing.
    "ankle": (-0.50, [(10, -0.85, 1, 0.50), (11, -0.30, 2, 0.50)]),
}

_N_JITTER = 12


def _series_eval(s, offset, terms, jitter, shift=0.0):
    value = np.full_like(s, offset)
    for slot, amp, k, phase in terms:
        value = value + jitter[slot] * amp * np.cos(2.0 * np.pi * k * (s - phase - shift))
    return value


def _series_deriv(s, terms, jitter, shift=0.0):
    value = np.zeros_like(s)
    for slot, amp, k, phase in terms:
        w = 2.0 * np.pi * k
        value = value - jitter[slot] * amp * w * np.sin(w * (s - phase - shift))
    return value


def synth_gait(seed, condition, n=DEFAULT_SAMPLES, subject=None):
    """Deterministic synthetic stride for desk-scale runs.

    The loaded condition scales net moments, shifts their timing, delays
    toe-off, and lengthens the stride relative to noload at the same seed.
    """
    if condition not in CONDITIONS:
        raise DomainError(f"condition {condition!r} not in {CONDITIONS}", field="condition")
    subject = subject or Subject()
    rng = np.random.default_rng(int(seed))
    jitter = rng.uniform(0.97, 1.03, size=_N_JITTER)

    loaded = condition == "loaded"
    moment_gain = 1.35 if loaded else 1.0
    moment_shift = 0.02 if loaded else 0.0
    angle_gain = 0.97 if loaded else 1.0
    stride_s = 1.18 if loaded else 1.10
    toe_off = 62.0 if loaded else 60.0
    grf_gain = (subject.mass_kg + 38.0) / subject.mass_kg if loaded else 1.0

    pct = np.linspace(0.0, 100.0, n)
    s = pct / 100.0

    angles = {}
    vels = {}
    for joint, (offset, terms) in _ANGLE_SERIES.items():
        angles[joint] = angle_gain * _series_eval(s, offset, terms, jitter)
        vels[joint] = angle_gain * _series_deriv(s, terms, jitter) / stride_s

    moments = {}
    for joint, (offset, terms) in _MOMENT_SERIES.items():
        moments[joint] = moment_gain * _series_eval(s, offset, terms, jitter, shift=moment_shift)

    # Ground reactions: smooth single-hump vertical with a mid-stance dip and
    # a braking/propulsion horizontal wave, zero after toe-off.
    u = np.clip(s / (toe_off / 100.0), 0.0, 1.0)
    in_stance = (s <= toe_off / 100.0).astype(float)
    grf_y = grf_gain * 10.8 * np.sin(np.pi * u) * (1.0 - 0.22 * np.sin(np.pi * u) ** 2) * in_stance
    grf_x = grf_gain * -1.8 * np.sin(2.0 * np.pi * u) * np.sin(np.pi * u) * in_stance

    return GaitCycle(
        pct=pct,
        hip_angle_rad=angles["hip"],
        knee_angle_rad=angles["knee"],
        ankle_angle_rad=angles["ankle"],
        hip_vel_rad_s=vels["hip"],
        knee_vel_rad_s=vels["knee"],
        ankle_vel_rad_s=vels["ankle"],
        hip_moment_nm_kg=moments["hip"],
        knee_moment_nm_kg=moments["knee"],
        ankle_moment_nm_kg=moments["ankle"],
        grf_x_n_kg=grf_x,
        grf_y_n_kg=grf_y,
        toe_off_pct=toe_off,
        stride_s=stride_s,
        condition=condition,
        subject_mass_kg=subject.mass_kg,
    )

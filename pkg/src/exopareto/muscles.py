"""Lumped sagittal muscle groups and their torque-capacity matrix.

Each group is a linear torque generator: at activation a it contributes
a * capacity N*m at each joint it spans. Capacities are signed in the
flexion-positive (dorsiflexion-positive at the ankle) convention and were
chosen to span both directions at every joint; they are desk-scale fixtures,
not physiological measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError, SchemaError

JOINTS = ("hip", "knee", "ankle")

FIXTURE_COLUMNS = ("name", "mass_kg", "cap_hip_nm", "cap_knee_nm", "cap_ankle_nm")


@dataclass(frozen=True)
class MuscleGroup:
    name: str
    mass_kg: float
    cap_hip_nm: float
    cap_knee_nm: float
    cap_ankle_nm: float

    def __post_init__(self):
        if self.mass_kg <= 0.0:
            raise DomainError(f"muscle {self.name}: mass must be > 0", field="mass_kg")

    @property
    def capacities(self):
        return np.array([self.cap_hip_nm, self.cap_knee_nm, self.cap_ankle_nm])


class MuscleSet:
    """Ordered collection of muscle groups with the stacked capacity matrix.

    Sets loaded from fixture files must span all three joints (full row
    rank); directly constructed partial sets are allowed for focused tests.
    """

    def __init__(self, groups, require_full_rank=False):
        groups = list(groups)
        if not groups:
            raise DomainError("muscle set is empty")
        self.groups = groups
        self.names = [g.name for g in groups]
        self.masses_kg = np.array([g.mass_kg for g in groups])
        # (3 joints, M muscles)
        self.capacity_nm = np.column_stack([g.capacities for g in groups])
        if require_full_rank and np.linalg.matrix_rank(self.capacity_nm) < len(JOINTS):
            raise DataError("capacity matrix is rank-deficient over the 3 joints")

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    @classmethod
    def default(cls):
        with resources.as_file(
            resources.files("exopareto.data").joinpath("muscles_default.csv")
        ) as path:
            return cls.from_csv(path)

    @classmethod
    def from_csv(cls, path):
        path = Path(path)
        if not path.exists():
            raise SchemaError(f"muscle fixtures file not found: {path}", path=str(path))
        lines = [
            line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()
        ]
        header = tuple(h.strip() for h in lines[0].split(","))
        for column in FIXTURE_COLUMNS:
            if column not in header:
                raise SchemaError(f"missing column {column}", column=column, path=str(path))
        idx = {name: header.index(name) for name in FIXTURE_COLUMNS}
        groups = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = [p.strip() for p in line.split(",")]
            try:
                groups.append(
                    MuscleGroup(
                        name=parts[idx["name"]],
                        mass_kg=float(parts[idx["mass_kg"]]),
                        cap_hip_nm=float(parts[idx["cap_hip_nm"]]),
                        cap_knee_nm=float(parts[idx["cap_knee_nm"]]),
                        cap_ankle_nm=float(parts[idx["cap_ankle_nm"]]),
                    )
                )
            except (ValueError, IndexError):
                raise DataError(f"bad muscle row on line {lineno}", row=lineno, path=str(path))
        return cls(groups, require_full_rank=True)

    def to_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [",".join(FIXTURE_COLUMNS)]
        for g in self.groups:
            lines.append(
                f"{g.name},{g.mass_kg!r},{g.cap_hip_nm!r},{g.cap_knee_nm!r},{g.cap_ankle_nm!r}"
            )
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

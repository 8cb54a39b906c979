"""Simulation-based multi-criteria design of hip/knee exoskeleton assistance.

Solves per-sample muscle/device/reserve recruitment under peak-torque
limits, sweeps the limit grid into trade-off fronts of metabolic reduction
versus device power, and superposes regeneration and worn-mass/inertia
effects for design selection.
"""

from .energetics import (
    EnergyReport,
    actuator_power,
    energy_report,
    metabolic_reduction,
    muscle_metabolic_rate,
    power_integrals,
)
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    ExoParetoError,
    FormatError,
    NumericError,
    SchemaError,
)
from .gait import (
    GaitCycle,
    Subject,
    load_gait_csv,
    phase_bounds,
    resample,
    synth_gait,
    write_gait_csv,
)
from .kinematics import (
    ExoDesign,
    ExoVariant,
    actuator_velocities,
    fk_jacobian,
    forward_kinematics,
    make_design,
    torque_label,
    torque_map,
    velocity_map,
)
from .muscles import MuscleGroup, MuscleSet
from .overlay import (
    InertiaSpec,
    OverlayParams,
    apply_overlays,
    browning_inertia_delta,
    browning_mass_delta,
    location_factor,
    maf,
    regen_adjust,
)
from .pareto import DesignPoint, Front, dominance_filter, sweep
from .pipeline import RunConfig, run_pipeline
from .qp import BACKEND
from .reactions import newton_euler_reactions, peak_reduction
from .solver import AssistSolution, StepProblem, StepSolution, solve_cycle, solve_step
from .stats import PhaseStats, median_iqr, rmse_per_phase

__version__ = "0.1.0"

__all__ = [
    "AssistSolution",
    "BACKEND",
    "ConfigError",
    "DataError",
    "DesignPoint",
    "DomainError",
    "EnergyReport",
    "ExoDesign",
    "ExoParetoError",
    "ExoVariant",
    "FormatError",
    "Front",
    "GaitCycle",
    "InertiaSpec",
    "MuscleGroup",
    "MuscleSet",
    "NumericError",
    "OverlayParams",
    "PhaseStats",
    "RunConfig",
    "SchemaError",
    "StepProblem",
    "StepSolution",
    "Subject",
    "actuator_power",
    "actuator_velocities",
    "apply_overlays",
    "browning_inertia_delta",
    "browning_mass_delta",
    "dominance_filter",
    "energy_report",
    "fk_jacobian",
    "forward_kinematics",
    "load_gait_csv",
    "location_factor",
    "maf",
    "make_design",
    "median_iqr",
    "metabolic_reduction",
    "muscle_metabolic_rate",
    "newton_euler_reactions",
    "peak_reduction",
    "phase_bounds",
    "power_integrals",
    "regen_adjust",
    "resample",
    "rmse_per_phase",
    "run_pipeline",
    "solve_cycle",
    "solve_step",
    "sweep",
    "synth_gait",
    "torque_label",
    "torque_map",
    "velocity_map",
    "write_gait_csv",
]

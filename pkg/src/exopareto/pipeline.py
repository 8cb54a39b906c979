"""End-to-end run: sweep -> filter -> overlays -> stats -> artifacts.

Every artifact is deterministic for a fixed configuration and seed: CSV
numerics are fixed-format, JSON keys are sorted, and nothing embeds
timestamps or machine state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energetics import muscle_metabolic_rate
from .errors import ConfigError
from .gait import (
    CONDITIONS,
    DEFAULT_SAMPLES,
    Subject,
    load_gait_csv,
    phase_bounds,
    resample,
    synth_gait,
    write_gait_csv,
)
from .kinematics import ExoVariant, variant_from_string
from .muscles import MuscleSet
from .overlay import (
    OverlayParams,
    apply_overlays,
    browning_mass_delta,
    device_inertia_delta,
    maf_normalized,
    spec_for_design,
)
from .pareto import dominance_filter, sweep, write_points_csv
from .reactions import COMPONENTS, JOINT_ORDER, newton_euler_reactions
from .solver import solve_cycle
from .stats import median_iqr, rmse_per_phase
from .svg import write_scatter_svg

CSV_FMT = "%.9g"


@dataclass(frozen=True)
class RunConfig:
    out_dir: Path
    variants: tuple = (ExoVariant.MONO, ExoVariant.BI)
    conditions: tuple = CONDITIONS
    seed: int = 7
    gait_paths: dict = field(default_factory=dict)  # condition -> path
    muscles_path: Path = None
    subject: Subject = field(default_factory=Subject)
    overlay: OverlayParams = field(default_factory=lambda: OverlayParams(regen_eta=0.65))

    @classmethod
    def from_file(cls, path, out_dir, overrides=None):
        values = parse_config_file(path)
        values.update(overrides or {})
        return cls.from_values(values, out_dir)

    @classmethod
    def from_values(cls, values, out_dir):
        def split_list(key, default):
            raw = values.get(key)
            if raw is None:
                return default
            return tuple(part.strip() for part in raw.split(",") if part.strip())

        variants = tuple(variant_from_string(v) for v in split_list("variants", ("mono", "bi")))
        conditions = split_list("conditions", CONDITIONS)
        for condition in conditions:
            if condition not in CONDITIONS:
                raise ConfigError(f"unknown condition {condition!r}", field="conditions")

        gait_paths = {}
        for condition in CONDITIONS:
            key = f"gait_{condition}"
            if values.get(key):
                path = Path(values[key])
                if not path.exists():
                    raise ConfigError(f"gait file not found: {path}", field=key)
                gait_paths[condition] = path

        muscles_path = None
        if values.get("muscles"):
            muscles_path = Path(values["muscles"])
            if not muscles_path.exists():
                raise ConfigError(f"muscle fixtures not found: {muscles_path}", field="muscles")

        subject_kwargs = {}
        if values.get("subject_mass_kg"):
            subject_kwargs["mass_kg"] = float(values["subject_mass_kg"])
        if values.get("subject_height_m"):
            subject_kwargs["height_m"] = float(values["subject_height_m"])

        overlay_kwargs = {}
        if values.get("regen_eta") is not None:
            overlay_kwargs["regen_eta"] = float(values["regen_eta"])
        if values.get("muscle_tendon_eta"):
            overlay_kwargs["muscle_tendon_eta"] = float(values["muscle_tendon_eta"])
        if values.get("beta"):
            overlay_kwargs["beta_w_kg"] = tuple(
                float(v) for v in values["beta"].split(",")
            )
        if values.get("gamma"):
            overlay_kwargs["gamma_w_kgm2"] = tuple(
                float(v) for v in values["gamma"].split(",")
            )
        if "regen_eta" not in overlay_kwargs:
            overlay_kwargs["regen_eta"] = 0.65

        return cls(
            out_dir=Path(out_dir),
            variants=variants,
            conditions=conditions,
            seed=int(values.get("seed", 7)),
            gait_paths=gait_paths,
            muscles_path=muscles_path,
            subject=Subject(**subject_kwargs),
            overlay=OverlayParams(**overlay_kwargs),
        )


def parse_config_file(path):
    """Plain key=value, UTF-8, '#' comments."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}", path=str(path))
    values = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line is not key=value: {raw!r}", path=str(path))
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _write_json(payload, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_reactions_csv(series, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = ["pct"] + [f"{j}_{c}" for j in JOINT_ORDER for c in COMPONENTS]
    lines = [",".join(columns)]
    n = series.pct.shape[0]
    for i in range(n):
        row = [CSV_FMT % series.pct[i]]
        for joint in JOINT_ORDER:
            for comp in COMPONENTS:
                row.append(CSV_FMT % series.loads[joint][comp][i])
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _point_report(point, unassisted_rate):
    rate = unassisted_rate * (1.0 - point.metabolic_reduction_pct / 100.0)
    return {
        "gross_metabolic_rate_w_kg": rate,
        "metabolic_reduction_pct": point.metabolic_reduction_pct,
        "abs_power_w_kg": point.abs_power_w_kg,
        "per_actuator_abs_power_w_kg": {
            "hip": point.hip_abs_power_w_kg,
            "knee": point.knee_abs_power_w_kg,
        },
        "pos_power_w_kg": point.abs_power_w_kg - point.neg_power_w_kg,
        "neg_power_w_kg": point.neg_power_w_kg,
        "max_pos_power_w_kg": point.max_pos_power_w_kg,
    }


def run_pipeline(config):
    """Execute the full workflow; returns the artifact directory."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    subject = config.subject
    muscles = MuscleSet.from_csv(config.muscles_path) if config.muscles_path else MuscleSet.default()

    gaits = {}
    for condition in config.conditions:
        if condition in config.gait_paths:
            gait = resample(load_gait_csv(config.gait_paths[condition]), DEFAULT_SAMPLES)
        else:
            gait = synth_gait(config.seed, condition, subject=subject)
        gaits[condition] = gait
        write_gait_csv(gait, out / f"gait_{condition}.csv")

    energy_payload = {}
    svg_series = []
    stats_payload = {}

    for condition in config.conditions:
        gait = gaits[condition]
        unassisted = solve_cycle(gait, muscles, design=None, subject=subject)
        unassisted_rate = muscle_metabolic_rate(unassisted)
        energy_payload[condition] = {
            "unassisted_rate_w_kg": unassisted_rate,
            "variants": {},
        }

        unassisted_reactions = newton_euler_reactions(gait, subject, sol=None)
        write_reactions_csv(unassisted_reactions, out / f"reactions_unassisted_{condition}.csv")

        bounds = phase_bounds(gait.toe_off_pct)
        ideal = {}
        for variant in config.variants:
            from .kinematics import make_design

            ideal_design = make_design(variant, 70.0, 70.0)
            ideal_sol = solve_cycle(
                gait, muscles, design=ideal_design, subject=subject,
                bounds=np.array([np.inf, np.inf]),
            )
            ideal[variant] = ideal_sol.joint_assist_nm()

        for variant in config.variants:
            points, _ = sweep(
                gait, muscles, variant, subject=subject,
                unassisted_rate_w_kg=unassisted_rate,
            )
            tag = f"{variant.value}_{condition}"
            write_points_csv(points, out / f"grid_{tag}.csv")
            front = dominance_filter(points)
            write_points_csv(front.points, out / f"front_{tag}.csv")

            overlaid_front, overlaid_points = apply_overlays(
                points, unassisted_rate, subject, params=config.overlay
            )
            write_points_csv(overlaid_front.points, out / f"front_overlaid_{tag}.csv")

            reports = {}
            overlay_reports = {}
            for point, over in zip(points, overlaid_points):
                reports[point.label] = _point_report(point, unassisted_rate)
                spec = spec_for_design(point.design, thigh_length_m=subject.thigh_length_m)
                overlay_reports[point.label] = {
                    "delta_mass_w_kg": browning_mass_delta(spec),
                    "delta_inertia_w_kg": device_inertia_delta(spec, subject, unassisted_rate),
                    "overlaid_reduction_pct": over.metabolic_reduction_pct,
                    "adjusted_power_w_kg": over.abs_power_w_kg,
                    "maf_w_kg": maf_normalized(
                        point.abs_power_w_kg - point.neg_power_w_kg,
                        point.neg_power_w_kg,
                        spec,
                        subject,
                        params=config.overlay,
                    ),
                    "on_overlaid_front": over.label in overlaid_front.labels(),
                }
            energy_payload[condition]["variants"][variant.value] = {
                "designs": reports,
                "overlays": overlay_reports,
            }

            svg_series.append(
                (
                    f"{variant.value} {condition}",
                    [
                        (p.metabolic_reduction_pct, p.abs_power_w_kg, p.label)
                        for p in front.points
                    ],
                )
            )

            # Reactions for the strongest front member (highest reduction).
            best = max(front.points, key=lambda p: p.metabolic_reduction_pct)
            best_sol = solve_cycle(gait, muscles, design=best.design, subject=subject)
            assisted_reactions = newton_euler_reactions(gait, subject, sol=best_sol)
            write_reactions_csv(assisted_reactions, out / f"reactions_{tag}_{best.label}.csv")

            # Assist-profile fidelity of front members against the
            # unconstrained profile, aggregated across the front.
            joint_stats = {}
            for j, joint in enumerate(("hip", "knee")):
                per_design = {}
                ptp_values = []
                rmse_values = []
                for p in front.points:
                    sol = solve_cycle(gait, muscles, design=p.design, subject=subject)
                    ps = rmse_per_phase(
                        ideal[variant][:, j], sol.joint_assist_nm()[:, j], gait.pct, bounds
                    )
                    per_design[p.label] = ps.to_json_dict()
                    rmse_values.append(ps.rmse_total)
                    ptp_values.extend(
                        v for v in ps.ptp_diff_pct_per_phase.values() if v is not None
                    )
                med_rmse, iqr_rmse = median_iqr(rmse_values)
                agg = {"rmse_total_median": med_rmse, "rmse_total_iqr": iqr_rmse}
                if ptp_values:
                    med_ptp, iqr_ptp = median_iqr(ptp_values)
                    agg["ptp_diff_pct_median"] = med_ptp
                    agg["ptp_diff_pct_iqr"] = iqr_ptp
                joint_stats[joint] = {"per_design": per_design, "aggregate": agg}
            stats_payload[tag] = joint_stats

    _write_json(energy_payload, out / "energy_reports.json")
    _write_json(stats_payload, out / "stats.json")
    write_scatter_svg(
        out / "fronts.svg",
        svg_series,
        title="Assistance trade-off fronts",
        x_label="metabolic reduction (%)",
        y_label="average absolute device power (W/kg)",
    )
    return out

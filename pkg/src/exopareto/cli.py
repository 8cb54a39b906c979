"""Command-line front end.

Exit codes: 0 success, 1 numeric failure, 2 configuration/schema failure.
Failures print a machine-readable JSON object to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .energetics import energy_report, muscle_metabolic_rate
from .errors import ConfigError, DataError, ExoParetoError, SchemaError
from .gait import Subject, load_gait_csv, phase_bounds, synth_gait, write_gait_csv
from .kinematics import load_design_file, make_design
from .muscles import MuscleSet
from .overlay import OverlayParams, apply_overlays
from .pareto import dominance_filter, load_points_csv, sweep, write_points_csv
from .pipeline import RunConfig, parse_config_file, run_pipeline, write_reactions_csv
from .reactions import newton_euler_reactions
from .solver import solve_cycle
from .stats import rmse_per_phase
from .svg import write_scatter_svg

CSV_FMT = "%.9g"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="exopareto",
        description="Multi-criteria exoskeleton assistance design toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic gait cycle")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--condition", default="noload")
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="solve recruitment for one gait cycle")
    p.add_argument("--gait", required=True)
    p.add_argument("--muscles")
    p.add_argument("--design", help="design file (key=value)")
    p.add_argument("--variant", help="build a design from variant + peaks")
    p.add_argument("--hip-peak", type=float, default=70.0)
    p.add_argument("--knee-peak", type=float, default=70.0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("pareto", help="sweep the peak-torque grid")
    p.add_argument("--gait", required=True)
    p.add_argument("--muscles")
    p.add_argument("--variant", required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("overlay", help="apply regeneration and inertia overlays")
    p.add_argument("--grid", required=True, help="grid CSV from the pareto step")
    p.add_argument("--unassisted-rate", type=float, required=True)
    p.add_argument("--eta-regen", type=float, default=0.0)
    p.add_argument("--subject-mass", type=float, default=75.0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("reactions", help="joint reaction loads for one cycle")
    p.add_argument("--gait", required=True)
    p.add_argument("--muscles")
    p.add_argument("--variant")
    p.add_argument("--hip-peak", type=float, default=70.0)
    p.add_argument("--knee-peak", type=float, default=70.0)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("stats", help="phase-wise RMSE/peak-to-peak of two series")
    p.add_argument("--a", required=True, help="reference CSV")
    p.add_argument("--b", required=True, help="comparison CSV")
    p.add_argument("--column", required=True)
    p.add_argument("--toe-off", type=float, default=60.0)
    p.add_argument("--out", required=True, help="output JSON path")

    p = sub.add_parser("plot", help="scatter SVG from front CSVs")
    p.add_argument("--fronts", required=True, nargs="+")
    p.add_argument("--out", required=True, help="output SVG path")

    p = sub.add_parser("pipeline", help="full run from a config file")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="artifact directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--eta-regen", type=float)

    return parser


def _load_muscles(path):
    return MuscleSet.from_csv(path) if path else MuscleSet.default()


def _design_from_args(args):
    if args.design:
        return load_design_file(args.design)
    if args.variant:
        return make_design(args.variant, args.hip_peak, args.knee_peak)
    return None


def _read_series_csv(path, column):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"file not found: {path}", path=str(path))
    lines = [l for l in path.read_text(encoding="utf-8").splitlines() if l.strip()]
    header = lines[0].split(",")
    if "pct" not in header or column not in header:
        raise SchemaError(f"need columns pct and {column}", column=column, path=str(path))
    pct_i, col_i = header.index("pct"), header.index(column)
    pct, values = [], []
    for line in lines[1:]:
        parts = line.split(",")
        pct.append(float(parts[pct_i]))
        values.append(float(parts[col_i]))
    return np.asarray(pct), np.asarray(values)


def _cmd_synth(args):
    gait = synth_gait(args.seed, args.condition)
    write_gait_csv(gait, args.out)
    print(f"wrote {args.out}")


def _cmd_solve(args):
    gait = load_gait_csv(args.gait)
    muscles = _load_muscles(args.muscles)
    design = _design_from_args(args)
    subject = Subject(mass_kg=gait.subject_mass_kg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    unassisted = solve_cycle(gait, muscles, design=None, subject=subject)
    baseline_rate = muscle_metabolic_rate(unassisted)
    sol = unassisted if design is None else solve_cycle(gait, muscles, design=design, subject=subject)
    report = energy_report(sol, unassisted_rate_w_kg=baseline_rate)
    report.write_json(out / "energy.json")

    columns = [("pct", gait.pct)]
    columns += [(f"a_{name}", sol.activations[:, i]) for i, name in enumerate(muscles.names)]
    for j in range(sol.device_torques_nm.shape[1]):
        columns.append((f"exo_{('hip', 'knee')[j]}_nm", sol.device_torques_nm[:, j]))
    for j, joint in enumerate(("hip", "knee", "ankle")):
        columns.append((f"reserve_{joint}_nm", sol.reserve_torques_nm[:, j]))
    lines = [",".join(name for name, _ in columns)]
    for i in range(gait.n_samples):
        lines.append(",".join(CSV_FMT % col[i] for _, col in columns))
    (out / "solution.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out / 'solution.csv'} and {out / 'energy.json'}")


def _cmd_pareto(args):
    gait = load_gait_csv(args.gait)
    muscles = _load_muscles(args.muscles)
    subject = Subject(mass_kg=gait.subject_mass_kg)
    points, unassisted_rate = sweep(gait, muscles, args.variant, subject=subject)
    out = Path(args.out)
    tag = f"{args.variant}_{gait.condition}"
    write_points_csv(points, out / f"grid_{tag}.csv")
    front = dominance_filter(points)
    write_points_csv(front.points, out / f"front_{tag}.csv")
    (out / f"unassisted_{gait.condition}.json").write_text(
        json.dumps({"unassisted_rate_w_kg": unassisted_rate}, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote grid and front for {tag} ({len(front)} non-dominated of {len(points)})")


def _cmd_overlay(args):
    points = load_points_csv(args.grid)
    params = OverlayParams(regen_eta=args.eta_regen)
    subject = Subject(mass_kg=args.subject_mass)
    front, overlaid = apply_overlays(points, args.unassisted_rate, subject, params=params)
    out = Path(args.out)
    stem = Path(args.grid).stem.replace("grid_", "")
    write_points_csv(overlaid, out / f"grid_overlaid_{stem}.csv")
    write_points_csv(front.points, out / f"front_overlaid_{stem}.csv")
    print(f"wrote overlaid grid and front ({len(front)} non-dominated)")


def _cmd_reactions(args):
    gait = load_gait_csv(args.gait)
    subject = Subject(mass_kg=gait.subject_mass_kg)
    sol = None
    if args.variant:
        muscles = _load_muscles(args.muscles)
        design = make_design(args.variant, args.hip_peak, args.knee_peak)
        sol = solve_cycle(gait, muscles, design=design, subject=subject)
    series = newton_euler_reactions(gait, subject, sol=sol)
    write_reactions_csv(series, args.out)
    print(f"wrote {args.out}")


def _cmd_stats(args):
    pct_a, a = _read_series_csv(args.a, args.column)
    pct_b, b = _read_series_csv(args.b, args.column)
    if pct_a.shape != pct_b.shape or not np.array_equal(pct_a, pct_b):
        raise DataError("the two series are not on the same percent grid")
    bounds = phase_bounds(args.toe_off)
    result = rmse_per_phase(a, b, pct_a, bounds)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(result.to_json_dict(), indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"wrote {out}")


def _cmd_plot(args):
    series = []
    for path in args.fronts:
        points = load_points_csv(path)
        name = Path(path).stem.replace("front_", "").replace("grid_", "")
        series.append(
            (name, [(p.metabolic_reduction_pct, p.abs_power_w_kg, p.label) for p in points])
        )
    write_scatter_svg(
        args.out,
        series,
        title="Assistance trade-off fronts",
        x_label="metabolic reduction (%)",
        y_label="average absolute device power (W/kg)",
    )
    print(f"wrote {args.out}")


def _cmd_pipeline(args):
    values = parse_config_file(args.config) if args.config else {}
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.eta_regen is not None:
        values["regen_eta"] = str(args.eta_regen)
    config = RunConfig.from_values(values, args.out)
    out = run_pipeline(config)
    print(f"pipeline artifacts in {out}")


_COMMANDS = {
    "synth": _cmd_synth,
    "solve": _cmd_solve,
    "pareto": _cmd_pareto,
    "overlay": _cmd_overlay,
    "reactions": _cmd_reactions,
    "stats": _cmd_stats,
    "plot": _cmd_plot,
    "pipeline": _cmd_pipeline,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ExoParetoError as err:
        print(json.dumps({"error": err.to_json_dict()}, sort_keys=True), file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(
            json.dumps({"error": {"type": "OSError", "message": str(err)}}, sort_keys=True),
            file=sys.stderr,
        )
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

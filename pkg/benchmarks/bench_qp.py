#!/usr/bin/env python3
"""Benchmark the compiled recruitment kernel against its pure-numpy twin.

Two workloads:
  * kernel: repeated single-sample solves on the production problem shape
    (9 muscles + 2 actuators + 3 reserves, 3 equality rows);
  * sweep: the full 25-design peak-torque grid on one synthetic stride.

Run:  python3 benchmarks/bench_qp.py
"""

import time

import numpy as np

from exopareto import MuscleSet, Subject, synth_gait
from exopareto.kinematics import make_design
from exopareto.pareto import sweep
from exopareto.qp import available_backends
from exopareto.solver import StepProblem, solve_step


def bench_kernel(kernel, repeats=2000):
    subject = Subject()
    muscles = MuscleSet.default()
    gait = synth_gait(7, "noload", subject=subject)
    design = make_design("bi", 50, 60)
    moments = gait.moments_nm_kg() * subject.mass_kg
    problems = [
        StepProblem(
            tau_net_nm=moments[i % gait.n_samples],
            capacity_nm=muscles.capacity_nm,
            device_map=design.joint_moment_map(),
            device_bounds_nm=design.torque_bounds(),
        )
        for i in range(101)
    ]
    start = time.perf_counter()
    for i in range(repeats):
        solve_step(problems[i % len(problems)], kernel=kernel)
    elapsed = time.perf_counter() - start
    return elapsed / repeats


def bench_sweep(kernel):
    subject = Subject()
    muscles = MuscleSet.default()
    gait = synth_gait(7, "noload", subject=subject)
    start = time.perf_counter()
    sweep(gait, muscles, "mono", subject=subject, kernel=kernel)
    return time.perf_counter() - start


def main():
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    results = {}
    for name, kernel in backends.items():
        per_step = bench_kernel(kernel)
        sweep_s = bench_sweep(kernel)
        results[name] = (per_step, sweep_s)
        print(f"{name:>8}: {per_step * 1e6:8.1f} us/solve   "
              f"25-design sweep {sweep_s:6.2f} s")
    if {"python", "cython"} <= results.keys():
        speedup = results["python"][0] / results["cython"][0]
        print(f"compiled kernel speedup: {speedup:.1f}x per solve")


if __name__ == "__main__":
    main()

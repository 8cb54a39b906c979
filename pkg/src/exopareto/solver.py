"""Per-sample recruitment of muscles, device torques, and reserves.

At every gait sample the net joint moments must be met by

    R @ a  +  E @ tau_dev  +  tau_res  =  tau_net

where R is the muscle capacity matrix, E the device joint-moment map, and
tau_res the unbounded reserve torques that guarantee feasibility. The
recruitment minimizes

    sum a_i^2 + sum (tau_dev_j / w_dev)^2 + sum (tau_res_k / w_res)^2

subject to 0 <= a <= 1 and |tau_dev| <= peak bounds. A large device weight
(default 1000 N*m) makes assistance cheap so the optimizer uses it; the
small reserve weight (1 N*m) makes reserves expensive so they stay near
zero whenever muscles and device can span the demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qp
from .errors import DomainError, NumericError
from .gait import Subject
from .kinematics import actuator_velocities
from .muscles import JOINTS

DEFAULT_W_DEV = 1000.0
DEFAULT_W_RES = 1.0

BALANCE_TOL = 1e-8


@dataclass(frozen=True)
class StepProblem:
    """One sample of the recruitment QP."""

    tau_net_nm: np.ndarray        # (J,) required joint moments, N*m
    capacity_nm: np.ndarray       # (J, M) muscle capacities
    device_map: np.ndarray        # (J, E) actuator -> joint moment columns
    device_bounds_nm: np.ndarray  # (E,) symmetric peak-torque bounds, >= 0
    w_dev: float = DEFAULT_W_DEV
    w_res: float = DEFAULT_W_RES
    with_reserves: bool = True

    def __post_init__(self):
        object.__setattr__(self, "tau_net_nm", np.asarray(self.tau_net_nm, dtype=float))
        object.__setattr__(self, "capacity_nm", np.asarray(self.capacity_nm, dtype=float))
        object.__setattr__(self, "device_map", np.asarray(self.device_map, dtype=float))
        object.__setattr__(
            self, "device_bounds_nm", np.asarray(self.device_bounds_nm, dtype=float)
        )
        if not np.isfinite(self.capacity_nm).all():
            raise DomainError("capacity matrix must be finite")
        if (self.device_bounds_nm < 0.0).any():
            raise DomainError("device torque bounds must be >= 0")
        if self.w_dev <= 0.0 or self.w_res <= 0.0:
            raise DomainError("weights must be > 0")

    @property
    def n_joints(self):
        return self.tau_net_nm.shape[0]

    @property
    def n_muscles(self):
        return self.capacity_nm.shape[1]

    @property
    def n_device(self):
        return self.device_map.shape[1]


@dataclass(frozen=True)
class StepSolution:
    activations: np.ndarray
    device_torques_nm: np.ndarray
    reserve_torques_nm: np.ndarray
    objective: float
    balance_residual_nm: float
    kkt_residual: float
    iterations: int


def _feasible_start(p):
    """a = 0, device = 0, reserves absorb tau_net.

    Without reserves a minimum-norm fit over all columns must land inside
    the bounds; feasibility is only guaranteed when reserves are present.
    """
    x0 = np.zeros(p.n_muscles + p.n_device + (p.n_joints if p.with_reserves else 0))
    if p.with_reserves:
        x0[p.n_muscles + p.n_device :] = p.tau_net_nm
        return x0
    columns = np.hstack([p.capacity_nm, p.device_map])
    sol, *_ = np.linalg.lstsq(columns, p.tau_net_nm, rcond=None)
    resid = columns @ sol - p.tau_net_nm
    a, tau = sol[: p.n_muscles], sol[p.n_muscles :]
    in_bounds = (a >= 0.0).all() and (a <= 1.0).all() and (
        np.abs(tau) <= p.device_bounds_nm + 1e-12
    ).all()
    if np.abs(resid).max(initial=0.0) > 1e-9 or not in_bounds:
        raise NumericError(
            "no feasible start without reserves",
            residual=float(np.abs(resid).max(initial=0.0)),
        )
    x0[: p.n_muscles + p.n_device] = sol
    return x0


def solve_step(p, kernel=None):
    """Solve one recruitment sample to KKT optimality."""
    kernel = kernel or qp.solve_box_eq_qp
    n_m, n_e, n_j = p.n_muscles, p.n_device, p.n_joints
    n_r = n_j if p.with_reserves else 0
    n = n_m + n_e + n_r

    d = np.empty(n)
    d[:n_m] = 1.0
    d[n_m : n_m + n_e] = 1.0 / p.w_dev**2
    if n_r:
        d[n_m + n_e :] = 1.0 / p.w_res**2

    A = np.zeros((n_j, n))
    A[:, :n_m] = p.capacity_nm
    A[:, n_m : n_m + n_e] = p.device_map
    if n_r:
        A[:, n_m + n_e :] = np.eye(n_j)

    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    lb[:n_m] = 0.0
    ub[:n_m] = 1.0
    lb[n_m : n_m + n_e] = -p.device_bounds_nm
    ub[n_m : n_m + n_e] = p.device_bounds_nm

    x0 = _feasible_start(p)
    x, lam, iters, status = kernel(d, A, p.tau_net_nm, lb, ub, x0)

    residual = float(np.abs(A @ x - p.tau_net_nm).max(initial=0.0))
    if status != qp.STATUS_OPTIMAL:
        raise NumericError(
            f"recruitment QP did not converge (status {status})",
            status=int(status),
            iterations=int(iters),
            residual=residual,
        )
    if residual > BALANCE_TOL:
        raise NumericError("torque balance residual above tolerance", residual=residual)

    # Stationarity of free variables; pinned variables need mu of the right
    # sign, which the kernel certified on exit.
    grad = 2.0 * d * x - A.T @ lam
    interior = (x > lb + 1e-12) & (x < ub - 1e-12)
    stationarity = float(np.abs(grad[interior]).max(initial=0.0))

    return StepSolution(
        activations=x[:n_m].copy(),
        device_torques_nm=x[n_m : n_m + n_e].copy(),
        reserve_torques_nm=x[n_m + n_e :].copy() if n_r else np.zeros(n_j),
        objective=float(np.sum(d * x * x)),
        balance_residual_nm=residual,
        kkt_residual=max(residual, stationarity),
        iterations=int(iters),
    )


@dataclass(frozen=True)
class AssistSolution:
    """Stacked per-sample solutions for one leg over one gait cycle.

    Left/right symmetry is handled by solving a single leg and mirroring,
    so device-level totals quoted per actuator refer to one leg's pair.
    """

    gait: object
    subject: Subject
    muscles: object
    design: object          # ExoDesign or None for the unassisted case
    activations: np.ndarray        # (N, M)
    device_torques_nm: np.ndarray  # (N, E)
    reserve_torques_nm: np.ndarray  # (N, J)
    objectives: np.ndarray         # (N,)
    actuator_vel_rad_s: np.ndarray  # (N, E)
    balance_residual_nm: float = field(default=0.0)

    @property
    def n_samples(self):
        return self.activations.shape[0]

    def joint_assist_nm(self):
        """(N, J) device torques mapped into joint space."""
        if self.design is None:
            return np.zeros((self.n_samples, len(JOINTS)))
        return self.device_torques_nm @ self.design.joint_moment_map().T


def solve_cycle(gait, muscles, design=None, subject=None,
                w_dev=DEFAULT_W_DEV, w_res=DEFAULT_W_RES, bounds=None, kernel=None):
    """Resolve recruitment at every sample of a gait cycle.

    `design=None` solves the unassisted problem (no device columns).
    `bounds=None` uses the design's peak torques; pass +-inf bounds to model
    an unconstrained device.
    """
    subject = subject or Subject(mass_kg=gait.subject_mass_kg)
    moments = gait.moments_nm_kg() * subject.mass_kg

    if design is None:
        device_map = np.zeros((len(JOINTS), 0))
        device_bounds = np.zeros(0)
        act_vel = np.zeros((gait.n_samples, 0))
    else:
        device_map = design.joint_moment_map()
        device_bounds = design.torque_bounds() if bounds is None else np.asarray(bounds, float)
        act_vel = actuator_velocities(design, gait)

    n = gait.n_samples
    n_m, n_e = len(muscles), device_map.shape[1]
    activations = np.empty((n, n_m))
    device_torques = np.empty((n, n_e))
    reserves = np.empty((n, len(JOINTS)))
    objectives = np.empty(n)
    worst_residual = 0.0

    for i in range(n):
        problem = StepProblem(
            tau_net_nm=moments[i],
            capacity_nm=muscles.capacity_nm,
            device_map=device_map,
            device_bounds_nm=device_bounds,
            w_dev=w_dev,
            w_res=w_res,
        )
        try:
            sol = solve_step(problem, kernel=kernel)
        except NumericError as err:
            err.detail["sample"] = i
            raise
        activations[i] = sol.activations
        device_torques[i] = sol.device_torques_nm
        reserves[i] = sol.reserve_torques_nm
        objectives[i] = sol.objective
        worst_residual = max(worst_residual, sol.balance_residual_nm)

    return AssistSolution(
        gait=gait,
        subject=subject,
        muscles=muscles,
        design=design,
        activations=activations,
        device_torques_nm=device_torques,
        reserve_torques_nm=reserves,
        objectives=objectives,
        actuator_vel_rad_s=act_vel,
        balance_residual_nm=worst_residual,
    )

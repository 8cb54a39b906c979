import numpy as np
import pytest

from exopareto.errors import DomainError, NumericError
from exopareto.kinematics import make_design
from exopareto.solver import StepProblem, solve_cycle, solve_step


def one_joint_problem(tau, cap=100.0, bound=np.inf, with_reserves=False, w_dev=1000.0):
    return StepProblem(
        tau_net_nm=np.array([tau]),
        capacity_nm=np.array([[cap]]),
        device_map=np.array([[1.0]]),
        device_bounds_nm=np.array([bound]),
        w_dev=w_dev,
        with_reserves=with_reserves,
    )


def test_closed_form_unbounded():
    # Stationarity of a^2 + (tau_dev/1000)^2 under 100 a + tau_dev = 50.
    sol = solve_step(one_joint_problem(50.0))
    assert abs(sol.device_torques_nm[0] - 5000.0 / 101.0) < 1e-9
    assert abs(sol.activations[0] - 50.0 / 10100.0) < 1e-12
    assert sol.balance_residual_nm < 1e-10


def test_zero_net_torque_gives_zero_solution():
    p = StepProblem(
        tau_net_nm=np.zeros(3),
        capacity_nm=np.array([[100.0, -50.0, 0.0], [0.0, 80.0, -60.0], [0.0, 0.0, 90.0]]),
        device_map=np.zeros((3, 0)),
        device_bounds_nm=np.zeros(0),
    )
    sol = solve_step(p)
    assert sol.objective == 0.0
    assert np.all(sol.activations == 0.0)
    assert np.all(sol.reserve_torques_nm == 0.0)


def test_saturated_bound_clamps_then_resolves():
    sol = solve_step(one_joint_problem(50.0, bound=20.0))
    np.testing.assert_allclose(sol.device_torques_nm[0], 20.0, atol=1e-12)
    np.testing.assert_allclose(sol.activations[0], 0.3, atol=1e-10)

    # Brute-force oracle: grid the feasible line (a determined by the
    # equality) at 1e-3 torque resolution.
    t_grid = np.arange(-20.0, 20.0 + 1e-9, 1e-3)
    a_line = (50.0 - t_grid) / 100.0
    ok = (a_line >= 0.0) & (a_line <= 1.0)
    cost = np.where(ok, a_line**2 + (t_grid / 1000.0) ** 2, np.inf)
    k = int(np.argmin(cost))
    assert abs(sol.device_torques_nm[0] - t_grid[k]) < 1e-2
    assert abs(sol.activations[0] - a_line[k]) < 1e-2


def grid_oracle_two_muscles(tau, caps, bound, w_dev=1000.0, w_res=1.0, step=1e-3):
    """Exhaustive search over activations; device/reserve split closed-form.

    For fixed activations the remaining 1-D problem (device torque within
    its box plus an unbounded reserve) minimizes
    (t/w_dev)^2 + ((r - t)/w_res)^2 over t in [-b, b] with r the residual
    torque, whose optimum is the clamped projection r*w_dev^2/(w_dev^2+w_res^2).
    """
    a1 = np.arange(0.0, 1.0 + step / 2, step)
    a2 = np.arange(0.0, 1.0 + step / 2, step)
    A1, A2 = np.meshgrid(a1, a2, indexing="ij")
    resid = tau - caps[0] * A1 - caps[1] * A2
    t = np.clip(resid * w_dev**2 / (w_dev**2 + w_res**2), -bound, bound)
    r = resid - t
    cost = A1**2 + A2**2 + (t / w_dev) ** 2 + (r / w_res) ** 2
    i, j = np.unravel_index(np.argmin(cost), cost.shape)
    return a1[i], a2[j], t[i, j], r[i, j]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_two_muscle_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    for _ in range(5):
        caps = rng.uniform(40.0, 120.0, 2)
        tau = rng.uniform(0.0, 0.9 * caps.sum())
        bound = rng.uniform(5.0, 40.0)
        p = StepProblem(
            tau_net_nm=np.array([tau]),
            capacity_nm=caps[None, :],
            device_map=np.array([[1.0]]),
            device_bounds_nm=np.array([bound]),
        )
        sol = solve_step(p)
        a1, a2, t, _ = grid_oracle_two_muscles(tau, caps, bound)
        assert abs(sol.activations[0] - a1) < 1e-2
        assert abs(sol.activations[1] - a2) < 1e-2
        # The torque is eliminated analytically in the oracle, so its
        # resolution is the grid step amplified by the capacities.
        assert abs(sol.device_torques_nm[0] - t) < 1e-2 + 1e-3 * caps.sum()


def test_validation_errors():
    with pytest.raises(DomainError):
        one_joint_problem(50.0, bound=-1.0)
    with pytest.raises(DomainError):
        StepProblem(
            tau_net_nm=np.array([1.0]),
            capacity_nm=np.array([[np.inf]]),
            device_map=np.zeros((1, 0)),
            device_bounds_nm=np.zeros(0),
        )


def test_no_reserves_requires_reachable_start():
    # Demand outside the span of muscle and device columns with reserves off.
    p = StepProblem(
        tau_net_nm=np.array([100.0, 50.0]),
        capacity_nm=np.array([[1.0], [0.0]]),
        device_map=np.zeros((2, 0)),
        device_bounds_nm=np.zeros(0),
        with_reserves=False,
    )
    with pytest.raises(NumericError):
        solve_step(p)


# ---------------------------------------------------------------------------
# Cycle level


def test_unassisted_cycle_shape(unassisted_noload, gait_noload, muscles):
    sol = unassisted_noload
    assert sol.device_torques_nm.shape == (gait_noload.n_samples, 0)
    assert sol.activations.shape == (gait_noload.n_samples, len(muscles))
    moments = gait_noload.moments_nm_kg()
    active = np.abs(moments).sum(axis=1) > 1e-6
    assert np.all(sol.activations[active].max(axis=1) > 0.0)
    assert np.all(sol.joint_assist_nm() == 0.0)


def test_torque_balance_invariant(gait_noload, muscles, subject):
    design = make_design("bi", 50, 40)
    sol = solve_cycle(gait_noload, muscles, design=design, subject=subject)
    moments = gait_noload.moments_nm_kg() * subject.mass_kg
    recon = (
        sol.activations @ muscles.capacity_nm.T
        + sol.joint_assist_nm()
        + sol.reserve_torques_nm
    )
    assert np.abs(recon - moments).max() < 1e-8


def test_objective_improves_with_larger_bounds(gait_noload, muscles, subject):
    loose = solve_cycle(gait_noload, muscles, design=make_design("mono", 70, 70), subject=subject)
    tight = solve_cycle(gait_noload, muscles, design=make_design("mono", 30, 30), subject=subject)
    assert np.all(loose.objectives <= tight.objectives + 1e-10)


def test_ideal_equivalence_mono_bi(gait_noload, muscles, subject):
    inf_bounds = np.array([np.inf, np.inf])
    mono = solve_cycle(gait_noload, muscles, design=make_design("mono", 70, 70),
                       subject=subject, w_dev=1e6, bounds=inf_bounds)
    bi = solve_cycle(gait_noload, muscles, design=make_design("bi", 70, 70),
                     subject=subject, w_dev=1e6, bounds=inf_bounds)
    am, ab = mono.joint_assist_nm(), bi.joint_assist_nm()
    for j in range(2):
        rms = np.sqrt(np.mean((am[:, j] - ab[:, j]) ** 2))
        assert rms < 0.01 * np.abs(am[:, j]).max()


def test_reserves_negligible_on_default_fixtures(unassisted_noload):
    # With w_res = 1 the reserve torque is half the constraint multiplier,
    # so "suppressed" means small against ~100 N*m demands, not zero.
    assert np.abs(unassisted_noload.reserve_torques_nm).max() < 5e-2


def test_cycle_determinism(gait_noload, muscles, subject):
    d = make_design("bi", 40, 60)
    a = solve_cycle(gait_noload, muscles, design=d, subject=subject)
    b = solve_cycle(gait_noload, muscles, design=d, subject=subject)
    assert np.array_equal(a.activations, b.activations)
    assert np.array_equal(a.device_torques_nm, b.device_torques_nm)
    assert np.array_equal(a.reserve_torques_nm, b.reserve_torques_nm)


def test_step_results_independent_of_order(gait_noload, muscles, subject):
    # Each sample is solved cold, so per-sample solutions equal the stacked run.
    design = make_design("mono", 40, 40)
    stacked = solve_cycle(gait_noload, muscles, design=design, subject=subject)
    moments = gait_noload.moments_nm_kg() * subject.mass_kg
    for i in (77, 13, 0, 100, 50):
        p = StepProblem(
            tau_net_nm=moments[i],
            capacity_nm=muscles.capacity_nm,
            device_map=design.joint_moment_map(),
            device_bounds_nm=design.torque_bounds(),
        )
        sol = solve_step(p)
        assert np.array_equal(sol.activations, stacked.activations[i])
        assert np.array_equal(sol.device_torques_nm, stacked.device_torques_nm[i])

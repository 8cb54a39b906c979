"""Pure-numpy active-set kernel for the per-sample recruitment problem.

Solves

    minimize    sum_i d_i * x_i**2
    subject to  A @ x = b,   lb <= x <= ub

with d > 0 (strictly convex, unique optimum). Bounds may be +-inf and a
feasible start `x0` is required; the cycle solver always provides one by
letting the unbounded reserve variables absorb the equality right-hand side.

The working set holds variables pinned at a bound. Each iteration solves the
equality-constrained subproblem in the m-dimensional multiplier space
(m = number of equality rows, 3 here), steps to the subproblem optimum or to
the first blocking bound, and exchanges working-set members based on the
bound multipliers. Tie-breaks (blocking bound, multiplier release) pick the
lowest variable index, which makes the kernel bitwise deterministic. The
compiled twin in `_qp_cy.pyx` follows the identical operation order.
"""

from __future__ import annotations

import numpy as np

_FREE, _LOWER, _UPPER, _FIXED = 0, 1, 2, 3

STATUS_OPTIMAL = 0
STATUS_MAXITER = 1
STATUS_SINGULAR = 2


def _solve_dense(M, rhs):
    """Gaussian elimination with partial pivoting; returns None if singular.

    Hand-rolled (not lapack) so the pure and compiled kernels perform the
    same floating-point operations.
    """
    m = rhs.shape[0]
    aug = np.concatenate([M, rhs[:, None]], axis=1)
    for col in range(m):
        pivot = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[pivot, col]) < 1e-300:
            return None
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col, col:] /= aug[col, col]
        for row in range(m):
            if row != col and aug[row, col] != 0.0:
                aug[row, col:] -= aug[row, col] * aug[col, col:]
    return aug[:, m].copy()


def _residual_correction(d, A, b, lb, ub, x, lam, state, inv2d):
    """Two equality-residual corrections at the optimum.

    Near-free variables carry 1/(2d) ~ w**2, which amplifies multiplier
    rounding into the balance residual; re-solving with the tiny residual
    itself as right-hand side removes the amplification. Only strictly
    interior variables absorb the correction (the unbounded reserves always
    qualify), so bounds stay respected up to a final clip.
    """
    for _ in range(2):
        interior = (state == _FREE) & (x > lb) & (x < ub)
        Af = A[:, interior]
        M = (Af * inv2d[interior]) @ Af.T
        dlam = _solve_dense(M, b - A @ x)
        if dlam is None:
            break
        lam = lam + dlam
        x = np.where(interior, x + (A.T @ dlam) * inv2d, x)
        np.clip(x, lb, ub, out=x)
    return x, lam


def solve_box_eq_qp(d, A, b, lb, ub, x0, max_iter=0):
    """Returns (x, lam, n_iter, status)."""
    d = np.asarray(d, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    n = d.shape[0]
    m = b.shape[0]
    if max_iter <= 0:
        max_iter = 50 * (n + 1)

    x = np.array(x0, dtype=float)
    state = np.full(n, _FREE, dtype=np.int64)
    for i in range(n):
        if lb[i] == ub[i]:
            state[i] = _FIXED
            x[i] = lb[i]
        elif x[i] <= lb[i]:
            state[i] = _LOWER
            x[i] = lb[i]
        elif x[i] >= ub[i]:
            state[i] = _UPPER
            x[i] = ub[i]

    inv2d = 1.0 / (2.0 * d)
    lam = np.zeros(m)

    for it in range(1, max_iter + 1):
        free = state == _FREE
        # Multiplier-space normal equations of the equality-constrained
        # subproblem: M lam = b - A_pinned x_pinned.
        Af = A[:, free]
        M = (Af * inv2d[free]) @ Af.T
        rhs = b.copy()
        if not free.all():
            rhs -= A[:, ~free] @ x[~free]
        lam_new = _solve_dense(M, rhs)
        if lam_new is None:
            return x, lam, it, STATUS_SINGULAR
        lam = lam_new

        q = A.T @ lam  # gradient of the coupling term per variable
        target = q * inv2d
        p = np.where(free, target - x, 0.0)
        scale = 1.0 + float(np.max(np.abs(np.where(free, target, 0.0)), initial=0.0))

        if float(np.max(np.abs(p), initial=0.0)) <= 1e-11 * scale:
            # Subproblem optimum reached; snap onto the exact target so the
            # equality residual stays at solve precision instead of being
            # amplified through the constraint matrix.
            x[free] = target[free]
            # Release the worst pinned bound, if any has a negative multiplier.
            worst = -1
            worst_ratio = -1e-9
            for i in range(n):
                if state[i] == _LOWER or state[i] == _UPPER:
                    g = 2.0 * d[i] * x[i] - q[i]
                    mu = g if state[i] == _LOWER else -g
                    ratio = mu / (1.0 + abs(2.0 * d[i] * x[i]) + abs(q[i]))
                    if ratio < worst_ratio:
                        worst_ratio = ratio
                        worst = i
            if worst < 0:
                x, lam = _residual_correction(d, A, b, lb, ub, x, lam, state, inv2d)
                return x, lam, it, STATUS_OPTIMAL
            state[worst] = _FREE
            continue

        # Step toward the subproblem optimum, stopping at the first bound.
        alpha = 1.0
        blocker = -1
        blocker_state = _FREE
        for i in range(n):
            if not free[i]:
                continue
            if p[i] > 0.0 and np.isfinite(ub[i]):
                ai = (ub[i] - x[i]) / p[i]
                if ai < alpha:
                    alpha, blocker, blocker_state = ai, i, _UPPER
            elif p[i] < 0.0 and np.isfinite(lb[i]):
                ai = (lb[i] - x[i]) / p[i]
                if ai < alpha:
                    alpha, blocker, blocker_state = ai, i, _LOWER
        if alpha < 0.0:
            alpha = 0.0
        x[free] += alpha * p[free]
        if blocker >= 0:
            x[blocker] = ub[blocker] if blocker_state == _UPPER else lb[blocker]
            state[blocker] = blocker_state

    return x, lam, max_iter, STATUS_MAXITER

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the active-set kernel in `_qp_py`.

Same algorithm, same operation order, same tie-breaking; see the pure
module for the mathematical description. Kept free of Python calls inside
the iteration loop so the per-sample solve stays in C.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite

cnp.import_array()

DEF STATUS_OPTIMAL = 0
DEF STATUS_MAXITER = 1
DEF STATUS_SINGULAR = 2

DEF FREE = 0
DEF LOWER = 1
DEF UPPER = 2
DEF FIXED = 3


cdef int _solve_dense(double[:, ::1] aug, double[::1] out, int m) nogil:
    """Partial-pivot elimination on the (m, m+1) augmented system."""
    cdef int col, row, pivot, k
    cdef double best, val, factor
    for col in range(m):
        pivot = col
        best = fabs(aug[col, col])
        for row in range(col + 1, m):
            val = fabs(aug[row, col])
            if val > best:
                best = val
                pivot = row
        if best < 1e-300:
            return 1
        if pivot != col:
            for k in range(col, m + 1):
                val = aug[col, k]
                aug[col, k] = aug[pivot, k]
                aug[pivot, k] = val
        factor = aug[col, col]
        for k in range(col, m + 1):
            aug[col, k] /= factor
        for row in range(m):
            if row != col and aug[row, col] != 0.0:
                factor = aug[row, col]
                for k in range(col, m + 1):
                    aug[row, k] -= factor * aug[col, k]
    for row in range(m):
        out[row] = aug[row, m]
    return 0


def solve_box_eq_qp(d_in, A_in, b_in, lb_in, ub_in, x0_in, int max_iter=0):
    """Returns (x, lam, n_iter, status); mirrors `_qp_py.solve_box_eq_qp`."""
    cdef cnp.ndarray[double, ndim=1] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] A = np.ascontiguousarray(A_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] lb = np.ascontiguousarray(lb_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] ub = np.ascontiguousarray(ub_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] x = np.array(x0_in, dtype=np.float64)

    cdef int n = d.shape[0]
    cdef int m = b.shape[0]
    if max_iter <= 0:
        max_iter = 50 * (n + 1)

    cdef cnp.ndarray[double, ndim=1] lam = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] inv2d = 1.0 / (2.0 * d)
    cdef cnp.ndarray[long, ndim=1] state = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=2] aug = np.zeros((m, m + 1), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] lam_new = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] delta = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] q = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] p = np.zeros(n, dtype=np.float64)

    cdef double[::1] dv = d
    cdef double[:, ::1] Av = A
    cdef double[::1] bv = b
    cdef double[::1] lbv = lb
    cdef double[::1] ubv = ub
    cdef double[::1] xv = x
    cdef double[::1] lamv = lam
    cdef double[::1] inv2dv = inv2d
    cdef long[::1] statev = state
    cdef double[:, ::1] augv = aug
    cdef double[::1] lam_newv = lam_new
    cdef double[::1] deltav = delta
    cdef double[::1] qv = q
    cdef double[::1] pv = p

    cdef int i, j, k, it, worst, blocker, blocker_state, pass_k
    cdef double acc, scale, pmax, target, g, mu, ratio, worst_ratio
    cdef double alpha, ai

    for i in range(n):
        if lbv[i] == ubv[i]:
            statev[i] = FIXED
            xv[i] = lbv[i]
        elif xv[i] <= lbv[i]:
            statev[i] = LOWER
            xv[i] = lbv[i]
        elif xv[i] >= ubv[i]:
            statev[i] = UPPER
            xv[i] = ubv[i]

    for it in range(1, max_iter + 1):
        # M lam = b - A_pinned x_pinned, with M = A_free diag(1/2d) A_free^T
        for j in range(m):
            for k in range(m):
                acc = 0.0
                for i in range(n):
                    if statev[i] == FREE:
                        acc += Av[j, i] * inv2dv[i] * Av[k, i]
                augv[j, k] = acc
            acc = bv[j]
            for i in range(n):
                if statev[i] != FREE:
                    acc -= Av[j, i] * xv[i]
            augv[j, m] = acc
        if _solve_dense(augv, lam_newv, m):
            return x, lam, it, STATUS_SINGULAR
        for j in range(m):
            lamv[j] = lam_newv[j]

        scale = 1.0
        pmax = 0.0
        for i in range(n):
            acc = 0.0
            for j in range(m):
                acc += Av[j, i] * lamv[j]
            qv[i] = acc
            if statev[i] == FREE:
                target = acc * inv2dv[i]
                pv[i] = target - xv[i]
                if 1.0 + fabs(target) > scale:
                    scale = 1.0 + fabs(target)
                if fabs(pv[i]) > pmax:
                    pmax = fabs(pv[i])
            else:
                pv[i] = 0.0

        if pmax <= 1e-11 * scale:
            # Snap onto the exact subproblem target (see pure twin).
            for i in range(n):
                if statev[i] == FREE:
                    xv[i] = qv[i] * inv2dv[i]
            worst = -1
            worst_ratio = -1e-9
            for i in range(n):
                if statev[i] == LOWER or statev[i] == UPPER:
                    g = 2.0 * dv[i] * xv[i] - qv[i]
                    mu = g if statev[i] == LOWER else -g
                    ratio = mu / (1.0 + fabs(2.0 * dv[i] * xv[i]) + fabs(qv[i]))
                    if ratio < worst_ratio:
                        worst_ratio = ratio
                        worst = i
            if worst < 0:
                # Two equality-residual corrections at the optimum (see the
                # pure twin): re-solve with the residual as right-hand side
                # over strictly interior variables, then clip.
                for pass_k in range(2):
                    for j in range(m):
                        for k in range(m):
                            acc = 0.0
                            for i in range(n):
                                if statev[i] == FREE and xv[i] > lbv[i] and xv[i] < ubv[i]:
                                    acc += Av[j, i] * inv2dv[i] * Av[k, i]
                            augv[j, k] = acc
                        acc = bv[j]
                        for i in range(n):
                            acc -= Av[j, i] * xv[i]
                        augv[j, m] = acc
                    if _solve_dense(augv, deltav, m):
                        break
                    for j in range(m):
                        lamv[j] = lamv[j] + deltav[j]
                    for i in range(n):
                        if statev[i] == FREE and xv[i] > lbv[i] and xv[i] < ubv[i]:
                            acc = 0.0
                            for j in range(m):
                                acc += Av[j, i] * deltav[j]
                            xv[i] = xv[i] + acc * inv2dv[i]
                            if xv[i] < lbv[i]:
                                xv[i] = lbv[i]
                            elif xv[i] > ubv[i]:
                                xv[i] = ubv[i]
                return x, lam, it, STATUS_OPTIMAL
            statev[worst] = FREE
            continue

        alpha = 1.0
        blocker = -1
        blocker_state = FREE
        for i in range(n):
            if statev[i] != FREE:
                continue
            if pv[i] > 0.0 and isfinite(ubv[i]):
                ai = (ubv[i] - xv[i]) / pv[i]
                if ai < alpha:
                    alpha = ai
                    blocker = i
                    blocker_state = UPPER
            elif pv[i] < 0.0 and isfinite(lbv[i]):
                ai = (lbv[i] - xv[i]) / pv[i]
                if ai < alpha:
                    alpha = ai
                    blocker = i
                    blocker_state = LOWER
        if alpha < 0.0:
            alpha = 0.0
        for i in range(n):
            if statev[i] == FREE:
                xv[i] += alpha * pv[i]
        if blocker >= 0:
            xv[blocker] = ubv[blocker] if blocker_state == UPPER else lbv[blocker]
            statev[blocker] = blocker_state

    return x, lam, max_iter, STATUS_MAXITER

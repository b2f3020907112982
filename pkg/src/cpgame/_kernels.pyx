# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors the semantics of ``_kernels_py``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef double FEAS_EPS = 1e-9
cdef int REFINE_ROUNDS = 2
cdef int REFINE_POINTS = 25


def greedy_fill(double amount, const cnp.int64_t[::1] order, const double[::1] headroom):
    """Allocate `amount` across slots in the given order, capped per slot."""
    alloc_arr = np.zeros(headroom.shape[0])
    cdef double[::1] alloc = alloc_arr
    cdef double remaining = amount
    cdef double take
    cdef Py_ssize_t i, t
    if amount <= 0.0 or order.shape[0] == 0:
        return alloc_arr, max(amount, 0.0)
    for i in range(order.shape[0]):
        t = order[i]
        take = headroom[t]
        if take > remaining:
            take = remaining
        if take > 0.0:
            alloc[t] = take
            remaining -= take
        if remaining <= 0.0:
            remaining = 0.0
            break
    return alloc_arr, remaining


cdef double _eval_x(const double[::1] opponent, const double[::1] x, const double[::1] prices,
                    double charge_total, double tie_tol) except? -1.0:
    cdef Py_ssize_t t, n = opponent.shape[0]
    cdef double s, peak = -1e300, num = 0.0, den = 0.0, energy = 0.0
    for t in range(n):
        s = opponent[t] + x[t]
        if s > peak:
            peak = s
    for t in range(n):
        s = opponent[t] + x[t]
        energy += prices[t] * x[t]
        if s >= peak - tie_tol:
            num += x[t]
            den += s
    if den <= 0.0:
        raise ValueError("degenerate zero-load system in cost evaluation")
    return charge_total * num / den + energy


def total_costs_batch(const double[:, ::1] deltas, const double[::1] baseline,
                      const double[::1] opponent, const double[::1] prices,
                      double charge_total, double tie_tol):
    """Exact tie-aware total cost of each candidate shift vector."""
    cdef Py_ssize_t k, t, n = baseline.shape[0], m = deltas.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    cdef double s, x, peak, num, den, energy
    for k in range(m):
        peak = -1e300
        for t in range(n):
            s = opponent[t] + baseline[t] + deltas[k, t]
            if s > peak:
                peak = s
        num = 0.0
        den = 0.0
        energy = 0.0
        for t in range(n):
            x = baseline[t] + deltas[k, t]
            s = opponent[t] + x
            energy += prices[t] * x
            if s >= peak - tie_tol:
                num += x
                den += s
        if den <= 0.0:
            raise ValueError("degenerate zero-load system in cost evaluation")
        out[k] = charge_total * num / den + energy
    return out_arr


def expected_total_costs_batch(const double[:, ::1] deltas, const double[::1] baseline,
                               const double[:, ::1] opponent_profiles, const double[::1] weights,
                               const double[::1] prices, double charge_total, double tie_tol):
    """Probability-weighted total cost of each candidate over opponent profiles."""
    cdef Py_ssize_t k, t, j, n = baseline.shape[0], m = deltas.shape[0]
    cdef Py_ssize_t n_prof = opponent_profiles.shape[0]
    out_arr = np.zeros(m)
    cdef double[::1] out = out_arr
    cdef double s, x, peak, num, den, energy, w
    for j in range(n_prof):
        w = weights[j]
        for k in range(m):
            peak = -1e300
            for t in range(n):
                s = opponent_profiles[j, t] + baseline[t] + deltas[k, t]
                if s > peak:
                    peak = s
            num = 0.0
            den = 0.0
            energy = 0.0
            for t in range(n):
                x = baseline[t] + deltas[k, t]
                s = opponent_profiles[j, t] + x
                energy += prices[t] * x
                if s >= peak - tie_tol:
                    num += x
                    den += s
            if den <= 0.0:
                raise ValueError("degenerate zero-load system in cost evaluation")
            out[k] += w * (charge_total * num / den + energy)
    return out_arr


def continuous_search(const double[::1] opponent, const double[::1] prices,
                      const double[::1] frozen_x,
                      double lower, double upper, double energy, int v_grid_points,
                      double charge_total, double tie_tol, initial_x=None):
    """Candidate-peak search; see ``_kernels_py.continuous_search``."""
    cdef Py_ssize_t t_n = opponent.shape[0]
    cdef Py_ssize_t h = frozen_x.shape[0]
    cdef Py_ssize_t n_free = t_n - h
    cdef double eps = FEAS_EPS * max(1.0, abs(energy))

    best_arr = None
    cdef double best_cost = np.inf
    cdef double cost
    if initial_x is not None:
        best_arr = np.array(initial_x, dtype=float)
        best_cost = _eval_x(opponent, best_arr, prices, charge_total, tie_tol)

    cdef Py_ssize_t t, i, t_c, g
    if n_free == 0:
        x0_arr = np.asarray(frozen_x, dtype=float).copy()
        cost = _eval_x(opponent, x0_arr, prices, charge_total, tie_tol)
        if cost < best_cost:
            return x0_arr, cost
        return best_arr, best_cost

    cdef double residual = energy
    for t in range(h):
        residual -= frozen_x[t]

    free_prices = np.asarray(prices)[h:]
    order_arr = (np.argsort(free_prices, kind="stable") + h).astype(np.int64)
    cdef cnp.int64_t[::1] free_order = order_arr

    work_arr = np.empty(t_n)
    cdef double[::1] work = work_arr
    for t in range(h):
        work[t] = frozen_x[t]

    cdef double need, remaining, cap, take, s_tc, v, dv
    cdef double base_need = residual - lower * n_free
    # Cap other intervals strictly below the candidate peak: landing exactly
    # on it would pull them into the tie set and inflate the charge.
    cdef double margin = 2.0 * tie_tol

    # Cheapest-energy candidate, no peak placement constraint.
    if base_need >= -eps:
        remaining = max(base_need, 0.0)
        for i in range(n_free):
            t = free_order[i]
            take = upper - lower
            if take > remaining:
                take = remaining
            work[t] = lower + take
            remaining -= take
        if remaining <= eps:
            cost = _eval_x(opponent, work, prices, charge_total, tie_tol)
            if cost < best_cost:
                best_arr = work_arr.copy()
                best_cost = cost

    # Frozen candidate peaks: keep every free interval under S(t_c).
    for t_c in range(h):
        if base_need < -eps:
            break
        s_tc = opponent[t_c] + frozen_x[t_c]
        remaining = max(base_need, 0.0)
        for i in range(n_free):
            t = free_order[i]
            cap = s_tc - margin - opponent[t]
            if cap > upper:
                cap = upper
            if cap < lower:
                cap = lower
            take = cap - lower
            if take > remaining:
                take = remaining
            work[t] = lower + take
            remaining -= take
        if remaining <= eps:
            cost = _eval_x(opponent, work, prices, charge_total, tie_tol)
            if cost < best_cost:
                best_arr = work_arr.copy()
                best_cost = cost

    # Free candidate peaks: scan own level v at t_c, cap the rest so the
    # system profile stays below S(t_c), fill cheapest-first. Two local
    # refinement passes around the best v sharpen the scan beyond the
    # coarse grid resolution.
    cdef int refine_points = REFINE_POINTS if REFINE_POINTS < v_grid_points else v_grid_points
    cdef int n_pts, rounds
    cdef double g_lo, g_hi, step, tc_cost, tc_v
    for t_c in range(h, t_n):
        g_lo = lower
        g_hi = upper
        n_pts = v_grid_points
        tc_cost = np.inf
        tc_v = lower
        step = 0.0
        for rounds in range(REFINE_ROUNDS + 1):
            if rounds > 0:
                if tc_cost == np.inf or step <= 0.0:
                    break
                g_lo = max(lower, tc_v - step)
                g_hi = min(upper, tc_v + step)
                n_pts = refine_points
            dv = (g_hi - g_lo) / (n_pts - 1) if n_pts > 1 else 0.0
            for g in range(n_pts):
                v = g_lo + dv * g
                if g == n_pts - 1:
                    v = g_hi
                need = residual - v - lower * (n_free - 1)
                if need < -eps:
                    continue
                remaining = max(need, 0.0)
                for i in range(n_free):
                    t = free_order[i]
                    if t == t_c:
                        continue
                    cap = v + opponent[t_c] - margin - opponent[t]
                    if cap > upper:
                        cap = upper
                    if cap < lower:
                        cap = lower
                    take = cap - lower
                    if take > remaining:
                        take = remaining
                    work[t] = lower + take
                    remaining -= take
                if remaining > eps:
                    continue
                work[t_c] = v
                cost = _eval_x(opponent, work, prices, charge_total, tie_tol)
                if cost < tc_cost:
                    tc_cost = cost
                    tc_v = v
                if cost < best_cost:
                    best_arr = work_arr.copy()
                    best_cost = cost
            step = (g_hi - g_lo) / (n_pts - 1) if n_pts > 1 else 0.0

    return best_arr, best_cost

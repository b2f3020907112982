"""Reference numpy implementations of the hot numeric kernels.

Semantics here are authoritative; ``_kernels`` (compiled) mirrors them.
All consumption vectors are MW per interval, costs in $.
"""

import numpy as np

BACKEND = "python"

_FEAS_EPS = 1e-9
REFINE_ROUNDS = 2
REFINE_POINTS = 25


def greedy_fill(amount, order, headroom):
    """Allocate `amount` across slots in the given order, capped per slot.

    Returns (alloc, leftover); alloc has the full headroom length and is
    zero outside `order`. leftover > 0 means the order could not absorb
    everything.
    """
    alloc = np.zeros_like(headroom)
    if amount <= 0.0 or order.size == 0:
        return alloc, max(amount, 0.0)
    caps = headroom[order]
    before = np.concatenate(([0.0], np.cumsum(caps)[:-1]))
    alloc[order] = np.clip(amount - before, 0.0, caps)
    return alloc, max(amount - float(caps.sum()), 0.0)


def total_costs_batch(deltas, baseline, opponent, prices, charge_total, tie_tol):
    """Exact tie-aware total cost of each candidate shift vector.

    Cost of candidate k: peak charge C * sum_peak(x_k) / sum_peak(S_k)
    plus energy cost sum(prices * x_k), where x_k = baseline + deltas[k]
    and S_k = opponent + x_k. Peak set is every interval within tie_tol
    of max(S_k).
    """
    x = baseline[None, :] + deltas
    s = opponent[None, :] + x
    peak = s.max(axis=1)
    mask = s >= (peak - tie_tol)[:, None]
    denom = (s * mask).sum(axis=1)
    if np.any(denom <= 0.0):
        raise ValueError("degenerate zero-load system in cost evaluation")
    cp = charge_total * (x * mask).sum(axis=1) / denom
    return cp + x @ prices


def expected_total_costs_batch(
    deltas, baseline, opponent_profiles, weights, prices, charge_total, tie_tol
):
    """Probability-weighted total cost of each candidate over opponent profiles."""
    totals = np.zeros(deltas.shape[0])
    for o, w in zip(opponent_profiles, weights):
        totals += w * total_costs_batch(deltas, baseline, o, prices, charge_total, tie_tol)
    return totals


def _eval_x(x, opponent, prices, charge_total, tie_tol):
    s = opponent + x
    peak = s.max()
    mask = s >= peak - tie_tol
    denom = float(s[mask].sum())
    if denom <= 0.0:
        raise ValueError("degenerate zero-load system in cost evaluation")
    return charge_total * float(x[mask].sum()) / denom + float(x @ prices)


def continuous_search(
    opponent,
    prices,
    frozen_x,
    lower,
    upper,
    energy,
    v_grid_points,
    charge_total,
    tie_tol,
    initial_x=None,
):
    """Candidate-peak search for the lowest-cost feasible consumption vector.

    Candidates: the supplied initial vector (preferred on cost ties), a
    cheapest-energy greedy fill, and, for every candidate peak interval
    t_c, a scan of own consumption levels v at t_c with the remaining
    free intervals capped so t_c stays on top, filled cheapest-first.
    Every survivor is re-evaluated with the exact tie-aware cost.

    Returns (best_x, best_cost); best_x is None when nothing feasible
    was found.
    """
    t_n = opponent.shape[0]
    h = frozen_x.shape[0]
    n_free = t_n - h
    eps = _FEAS_EPS * max(1.0, abs(energy))

    best_x = None
    best_cost = np.inf
    if initial_x is not None:
        best_x = np.asarray(initial_x, dtype=float).copy()
        best_cost = _eval_x(best_x, opponent, prices, charge_total, tie_tol)

    if n_free == 0:
        x = np.asarray(frozen_x, dtype=float).copy()
        cost = _eval_x(x, opponent, prices, charge_total, tie_tol)
        if cost < best_cost:
            best_x, best_cost = x, cost
        return best_x, best_cost

    residual = energy - float(frozen_x.sum())
    free = np.arange(h, t_n)
    free_order = free[np.argsort(prices[free], kind="stable")]
    # Cap other intervals strictly below the candidate peak: landing exactly
    # on it would pull them into the tie set and inflate the charge.
    margin = 2.0 * tie_tol

    def try_candidate(x):
        nonlocal best_x, best_cost
        cost = _eval_x(x, opponent, prices, charge_total, tie_tol)
        if cost < best_cost:
            best_x, best_cost = x, cost

    def fill_free(upper_bounds, order):
        need = residual - lower * n_free
        if need < -eps:
            return None
        head = np.zeros(t_n)
        head[free] = upper_bounds - lower
        alloc, leftover = greedy_fill(need, order, head)
        if leftover > eps:
            return None
        x = np.empty(t_n)
        x[:h] = frozen_x
        x[free] = lower + alloc[free]
        return x

    # Cheapest-energy candidate, no peak placement constraint.
    x = fill_free(np.full(n_free, upper), free_order)
    if x is not None:
        try_candidate(x)

    # Frozen candidate peaks: keep every free interval under S(t_c).
    for t_c in range(h):
        s_tc = opponent[t_c] + frozen_x[t_c]
        ub = np.clip(s_tc - margin - opponent[free], lower, upper)
        x = fill_free(ub, free_order)
        if x is not None:
            try_candidate(x)

    # Free candidate peaks: scan own level v at t_c, cap the rest so the
    # system profile stays below S(t_c), fill cheapest-first, then rank
    # all grid rows by exact cost. Two local refinement passes around the
    # best v sharpen the scan beyond the coarse grid resolution.
    refine_points = min(REFINE_POINTS, v_grid_points)
    for t_c in free:
        others = free[free != t_c]
        ord_pos = np.argsort(prices[others], kind="stable")

        def scan(grid):
            need = residual - grid - lower * (n_free - 1)
            ub = np.clip(
                grid[:, None] + (opponent[t_c] - margin - opponent[others])[None, :],
                lower,
                upper,
            )
            head = ub[:, ord_pos] - lower
            before = np.concatenate(
                (np.zeros((grid.shape[0], 1)), np.cumsum(head, axis=1)[:, :-1]), axis=1
            )
            alloc = np.clip(need[:, None] - before, 0.0, head)
            feasible = (need >= -eps) & (need - alloc.sum(axis=1) <= eps)
            if not feasible.any():
                return None
            x = np.empty((grid.shape[0], t_n))
            x[:, :h] = frozen_x
            x[:, t_c] = grid
            x[:, others[ord_pos]] = lower + alloc
            x = x[feasible]
            s = opponent[None, :] + x
            peak = s.max(axis=1)
            mask = s >= (peak - tie_tol)[:, None]
            cp = charge_total * (x * mask).sum(axis=1) / (s * mask).sum(axis=1)
            totals = cp + x @ prices
            k = int(np.argmin(totals))
            return float(totals[k]), x[k], float(grid[feasible][k])

        step = (upper - lower) / (v_grid_points - 1)
        found = scan(np.linspace(lower, upper, v_grid_points))
        for _ in range(REFINE_ROUNDS):
            if found is None or step <= 0.0:
                break
            lo = max(lower, found[2] - step)
            hi = min(upper, found[2] + step)
            better = scan(np.linspace(lo, hi, refine_points))
            if better is not None and better[0] < found[0]:
                found = better
            step = (hi - lo) / (refine_points - 1)
        if found is not None and found[0] < best_cost:
            best_cost, best_x = found[0], found[1].copy()

    return best_x, best_cost

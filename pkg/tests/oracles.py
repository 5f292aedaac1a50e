"""Independent oracles for the trimmed KS statistic.

The statistic is the optimum of a small linear program: choose trimmed
cumulative masses c_1 <= ... <= c_K at the candidate's breakpoints, with
per-breakpoint increments capped at mass/(1-alpha), minimizing the worst
deviation |c - reference| over the pooled evaluation points.  Three
independent solvers live here:

* ``trimmed_ks_oracle``: bisection on the objective with a greedy
  reachable-interval feasibility sweep (the primary oracle),
* ``trimmed_ks_lp``: exact LP via scipy linprog / HiGHS,
* ``trimmed_ks_grid``: literal dense grid search over cumulative weight
  vectors (n=4 only; exact to its grid resolution).

None of them share code with the envelope construction under test.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


def _constraints(candidate_values, reference):
    """Per-level bounds: level k (mass after k-th breakpoint) must sit within
    [rmax[k] - s, rmin[k] + s] where rmax/rmin aggregate the reference over
    the pooled points governed by that level."""
    values = np.asarray(candidate_values, dtype=np.float64)
    atoms, counts = np.unique(values, return_counts=True)
    masses = counts / values.size
    z = np.union1d(atoms, reference.knots)
    rv = reference.evaluate(z)
    level = np.searchsorted(atoms, z, side="right")
    n_levels = atoms.size + 1
    rmax = np.full(n_levels, -np.inf)
    rmin = np.full(n_levels, np.inf)
    np.maximum.at(rmax, level, rv)
    np.minimum.at(rmin, level, rv)
    return atoms, masses, rmax, rmin


def _feasible(s, masses, rmax, rmin, alpha) -> bool:
    caps = masses / (1.0 - alpha)
    lo, hi = 0.0, 0.0  # c_0 = 0
    if rmax[0] - s > 0.0 + 1e-15 or rmin[0] + s < 0.0 - 1e-15:
        return False
    for k in range(masses.size):
        lo, hi = lo, hi + caps[k]
        lo = max(lo, rmax[k + 1] - s, 0.0)
        hi = min(hi, rmin[k + 1] + s, 1.0)
        if lo > hi + 1e-15:
            return False
    # total mass is 1: the last level must reach exactly 1
    return lo - 1e-12 <= 1.0 <= hi + 1e-12


def trimmed_ks_oracle(candidate_values, reference, alpha, tol=1e-13) -> float:
    """Bisection + greedy sweep solution of the trimming LP."""
    atoms, masses, rmax, rmin = _constraints(candidate_values, reference)
    lo, hi = 0.0, 1.0
    if _feasible(lo, masses, rmax, rmin, alpha):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _feasible(mid, masses, rmax, rmin, alpha):
            hi = mid
        else:
            lo = mid
    return hi


def trimmed_ks_lp(candidate_values, reference, alpha) -> float:
    """Exact LP: variables (c_1..c_{K-1}, s), minimize s."""
    atoms, masses, rmax, rmin = _constraints(candidate_values, reference)
    caps = masses / (1.0 - alpha)
    n_mid = atoms.size - 1  # c_0 = 0 and c_K = 1 are pinned
    a_rows, b_vals = [], []

    def row(coeffs: dict, bound: float):
        r = np.zeros(n_mid + 1)
        for idx, val in coeffs.items():
            r[idx] = val
        a_rows.append(r)
        b_vals.append(bound)

    s_idx = n_mid
    # pooled deviation constraints; boundary levels pin c to 0 or 1
    for k in range(atoms.size + 1):
        if not np.isfinite(rmax[k]) and not np.isfinite(rmin[k]):
            continue
        if k == 0:
            row({s_idx: -1.0}, -rmax[0])           # s >= rmax[0] - 0
            row({s_idx: -1.0}, rmin[0])            # s >= 0 - rmin[0]
        elif k == atoms.size:
            row({s_idx: -1.0}, 1.0 - rmax[k])      # s >= rmax - 1
            row({s_idx: -1.0}, rmin[k] - 1.0)      # s >= 1 - rmin
        else:
            row({k - 1: 1.0, s_idx: -1.0}, rmin[k])
            row({k - 1: -1.0, s_idx: -1.0}, -rmax[k])
    # increment caps and monotonicity
    for k in range(atoms.size):
        prev = None if k == 0 else k - 1
        cur = None if k == atoms.size - 1 else k
        if prev is None and cur is None:  # single atom: 1 - 0 <= cap
            if 1.0 > caps[0] + 1e-12:
                return np.inf
            continue
        if prev is None:
            row({cur: 1.0}, caps[k])               # c_1 <= cap_1
            row({cur: -1.0}, 0.0)                  # c_1 >= 0
        elif cur is None:
            row({prev: -1.0}, caps[k] - 1.0)       # 1 - c_{K-1} <= cap_K
            row({prev: 1.0}, 1.0)                  # c_{K-1} <= 1
        else:
            row({cur: 1.0, prev: -1.0}, caps[k])
            row({cur: -1.0, prev: 1.0}, 0.0)
    bounds = [(0.0, 1.0)] * n_mid + [(0.0, None)]
    cost = np.zeros(n_mid + 1)
    cost[s_idx] = 1.0
    res = linprog(cost, A_ub=np.array(a_rows), b_ub=np.array(b_vals), bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return float(res.fun)


def trimmed_ks_grid(candidate_values, reference, alpha, steps=60):
    """Dense grid search over cumulative weight vectors (4 distinct atoms).

    Returns (best value, grid step); exact only to roughly one grid step.
    """
    atoms, masses, rmax, rmin = _constraints(candidate_values, reference)
    assert atoms.size == 4, "grid oracle is wired for n=4 distinct values"
    caps = masses / (1.0 - alpha)
    grid = np.linspace(0.0, 1.0, steps + 1)
    best = np.inf
    for c1, c2, c3 in itertools.product(grid, repeat=3):
        c = (0.0, c1, c2, c3, 1.0)
        if any(c[k + 1] - c[k] < -1e-12 or c[k + 1] - c[k] > caps[k] + 1e-12 for k in range(4)):
            continue
        s = 0.0
        for k in range(5):
            if np.isfinite(rmax[k]):
                s = max(s, rmax[k] - c[k], c[k] - rmin[k])
        best = min(best, s)
    return best, 1.0 / steps

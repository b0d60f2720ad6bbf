"""Independent brute-force oracles for the closed-form kernels.

These never call the closed-form code paths: minimizers are located by
refined 1-D grid search (or exhaustive enumeration), so they stay usable as
a second opinion in tests and for generating reference values from the CLI.
"""

from __future__ import annotations

import itertools

import numpy as np

__all__ = [
    "grid_minimize",
    "magnitude_fit_l2_objective",
    "magnitude_fit_l1_objective",
    "constrained_soft_threshold_objective",
    "oracle_magnitude_fit_l2",
    "oracle_magnitude_fit_l1",
    "oracle_constrained_soft_threshold",
    "oracle_hard_threshold",
    "oracle_project_sparsity",
]


def grid_minimize(f, lo: float, hi: float, points: int = 2001, refinements: int = 4):
    """Refined grid search for a 1-D minimum on [lo, hi]; returns (argmin, min).

    Each round re-grids around the incumbent, shrinking the bracket by the
    grid step, so the final argmin is located to ~(hi-lo)/points**refinements.
    """
    best_x, best_v = lo, f(np.array([lo]))[0]
    for _ in range(refinements):
        xs = np.linspace(lo, hi, points)
        vs = f(xs)
        i = int(np.argmin(vs))
        if vs[i] < best_v:
            best_x, best_v = float(xs[i]), float(vs[i])
        step = (hi - lo) / (points - 1)
        lo, hi = max(lo, best_x - step), min(hi, best_x + step)
    return best_x, best_v


def magnitude_fit_l2_objective(w_abs: float, b: float, r2: float):
    return lambda k: 0.5 * (b - k * w_abs) ** 2 + 0.5 * r2 * (1 - k) ** 2 * w_abs**2


def magnitude_fit_l1_objective(w_abs: float, b: float, r2: float):
    return lambda k: np.abs(b - k * w_abs) + 0.5 * r2 * (1 - k) ** 2 * w_abs**2


def constrained_soft_threshold_objective(y0: float, r: float):
    return lambda y: np.abs(y) + 0.5 * r * (y - y0) ** 2


def oracle_magnitude_fit_l2(w_abs: float, b: float, r2: float):
    """(k, objective) over k >= 0 by grid search; w_abs > 0."""
    hi = max(2.0, 2.0 * abs(b) / max(w_abs, 1e-300), 2.0)
    return grid_minimize(magnitude_fit_l2_objective(w_abs, b, r2), 0.0, hi)


def oracle_magnitude_fit_l1(w_abs: float, b: float, r2: float):
    """(k, objective) over k >= 0 by grid search; w_abs > 0."""
    hi = max(2.0, 2.0 * abs(b) / max(w_abs, 1e-300))
    return grid_minimize(magnitude_fit_l1_objective(w_abs, b, r2), 0.0, hi)


def oracle_constrained_soft_threshold(y0: float, y1: float, r: float):
    """(y, objective) over y >= y1 by grid search."""
    hi = max(y1, y0 + 2.0 / r, 0.0) + 1.0
    return grid_minimize(constrained_soft_threshold_objective(y0, r), y1, hi)


def oracle_hard_threshold(v: complex, r1: float, lam: float):
    """Two-candidate scalar oracle for min_q lam*1{q != 0} + (r1/2)|q - v|^2."""
    keep_cost = lam if v != 0 else 0.0
    zero_cost = 0.5 * r1 * abs(v) ** 2
    if zero_cost <= keep_cost:
        return 0.0 + 0.0j, zero_cost
    return complex(v), keep_cost


def oracle_project_sparsity(x, s: int):
    """Best s-sparse approximation by exhaustive support enumeration (small n)."""
    x = np.asarray(x, dtype=np.complex128)
    best, best_err = None, np.inf
    for support in itertools.combinations(range(x.size), s):
        y = np.zeros_like(x)
        y[list(support)] = x[list(support)]
        err = np.linalg.norm(y - x)
        if err < best_err:
            best, best_err = y, err
    return best, best_err

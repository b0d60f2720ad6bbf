"""Closed-form solutions of the three ADMM subproblems.

All kernels are entrywise (the x-update additionally applies the operator's
transforms) and pure, so they vectorize and parallelize freely.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "update_x",
    "hard_threshold_q",
    "magnitude_fit_l2",
    "magnitude_fit_l1",
    "constrained_soft_threshold",
    "update_z",
]


def update_x(op, q, z, lam1, lam2, r1: float, r2: float) -> np.ndarray:
    """Solve the x normal equation (r1 I + r2 A*A) x = r1 q + r2 A*z + A*lam2 - lam1.

    Valid whenever A*A has a real diagonal structure (unitary DFT, CDP); the
    solve is then a componentwise division by r1 + r2 diag(A*A).
    """
    q = np.asarray(q, dtype=np.complex128)
    lam1 = np.asarray(lam1, dtype=np.complex128)
    if q.shape != lam1.shape:
        raise ValueError("q and lam1 must have equal shapes")
    rhs = r1 * q + op.adjoint(r2 * np.asarray(z) + np.asarray(lam2)) - lam1
    return rhs / (r1 + r2 * op.gram_diagonal())


def hard_threshold_q(x, lam1, r1: float, lam: float) -> np.ndarray:
    """L0 proximal step: with v = x + lam1/r1, zero every entry with |v|^2 <= 2 lam/r1.

    Boundary ties go to zero, which favors sparsity.  |v|^2 is the squared
    complex modulus.
    """
    x = np.asarray(x, dtype=np.complex128)
    lam1 = np.asarray(lam1, dtype=np.complex128)
    if x.shape != lam1.shape:
        raise ValueError("x and lam1 must have equal shapes")
    v = x + lam1 / r1
    keep = v.real * v.real + v.imag * v.imag > 2.0 * lam / r1
    return np.where(keep, v, 0.0)


def magnitude_fit_l2(w_abs: float, b: float, r2: float) -> float:
    """Optimal ray length k for min_k (b - k w)^2/2 + r2 (1-k)^2 w^2 / 2.

    For w = 0 the returned value is directly the output magnitude b/(1+r2).
    """
    if w_abs == 0.0:
        return b / (1.0 + r2)
    return max(0.0, (b + r2 * w_abs) / ((1.0 + r2) * w_abs))


def constrained_soft_threshold(y0: float, y1: float, r: float) -> float:
    """Minimize |y| + (r/2)(y - y0)^2 over y >= y1.

    The objective is convex, so the constrained optimum is the unconstrained
    soft threshold of y0 projected onto [y1, inf).
    """
    y0_hat = np.sign(y0) * max(abs(y0) - 1.0 / r, 0.0)
    return float(max(y0_hat, y1))


def magnitude_fit_l1(w_abs: float, b: float, r2: float) -> float:
    """Optimal ray length k for min_{k>=0} |b - k w| + r2 (1-k)^2 w^2 / 2, w > 0.

    Solved through t = k w - b, which is a soft threshold of R = w - b
    constrained to t >= -b.
    """
    if w_abs <= 0.0:
        raise ValueError("magnitude_fit_l1 requires w_abs > 0")
    big_r = w_abs - b
    t_star = constrained_soft_threshold(big_r, -b, r2)
    return (t_star + b) / w_abs


def update_z(w, b, r2: float, p: int) -> np.ndarray:
    """Magnitude-fit proximal step: z_i = k_i* W_i with the per-entry optimal length.

    Entries with W_i = 0 get direction 1 + 0i and the degenerate optimal
    magnitude: b_i/(1+r2) for p = 2 and clip(b_i, 0, 1/r2) for p = 1.
    """
    w = np.asarray(w, dtype=np.complex128)
    b = np.asarray(b, dtype=np.float64)
    if w.shape != b.shape:
        raise ValueError("w and b must have equal shapes")
    w_abs = np.abs(w)
    zero = w_abs == 0.0
    safe = np.where(zero, 1.0, w_abs)
    if p == 2:
        k = np.maximum(0.0, (b + r2 * w_abs) / ((1.0 + r2) * safe))
        degenerate = b / (1.0 + r2)
    elif p == 1:
        big_r = w_abs - b
        t_hat = np.sign(big_r) * np.maximum(np.abs(big_r) - 1.0 / r2, 0.0)
        t_star = np.where(-b <= t_hat, t_hat, np.where(big_r >= 0, -b, 0.0))
        k = (t_star + b) / safe
        # minimizer of |b - m| + (r2/2) m^2 over m >= 0 (m = 0 if b < 0)
        degenerate = np.clip(b, 0.0, 1.0 / r2)
    else:
        raise ValueError("p must be 1 or 2")
    return np.where(zero, degenerate + 0.0j, k * w)

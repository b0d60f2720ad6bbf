"""Sparse-Fienup baseline: alternate projections onto the sparsity set C_s
and the Fourier magnitude set M = {x : |F x| = b}.

The iteration x^{k+1} = P_{C_s}(P_M(x^k)) receives only the sparsity budget s,
never the true support.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signals import RngSpec

__all__ = ["SprConfig", "project_sparsity", "project_magnitude", "spr_solve"]


@dataclass(frozen=True)
class SprConfig:
    s: int
    max_iters: int = 10_000
    tol: float = 1e-8
    rng: RngSpec = field(default_factory=lambda: RngSpec(0))

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")


def project_sparsity(x, s: int) -> np.ndarray:
    """Keep the s largest-modulus entries, zero the rest; ties go to lower index."""
    x = np.asarray(x, dtype=np.complex128)
    if not 1 <= s <= x.size:
        raise ValueError(f"s={s} must satisfy 1 <= s <= {x.size}")
    # stable sort on -|x| keeps the lowest index first among equal moduli
    keep = np.argsort(-np.abs(x), kind="stable")[:s]
    out = np.zeros_like(x)
    out[keep] = x[keep]
    return out


def project_magnitude(x, b) -> np.ndarray:
    """Replace Fourier magnitudes with b, keeping phases; zero bins get phase 1."""
    x = np.asarray(x, dtype=np.complex128)
    b = np.asarray(b, dtype=np.float64)
    if b.shape != x.shape:
        raise ValueError("x and b must have equal lengths")
    y = np.fft.fft(x, norm="ortho")
    mag = np.abs(y)
    phase = np.where(mag == 0, 1.0 + 0.0j, y / np.where(mag == 0, 1.0, mag))
    return np.fft.ifft(b * phase, norm="ortho")


def spr_solve(b, cfg: SprConfig):
    """Run the two-projection iteration from a random complex-Gaussian start.

    Returns (estimate, iterations).  Stops on relative change <= cfg.tol or at
    the iteration cap.
    """
    b = np.asarray(b, dtype=np.float64)
    gen = cfg.rng.generator()
    n = b.size
    x = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        x_next = project_sparsity(project_magnitude(x, b), cfg.s)
        denom = np.linalg.norm(x)
        if denom > 0 and np.linalg.norm(x_next - x) / denom <= cfg.tol:
            x = x_next
            break
        x = x_next
    return x, iters

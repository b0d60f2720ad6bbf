"""Measurement operators: unitary DFT and octanary coded diffraction patterns.

Both operators expose ``forward``, ``adjoint`` and the diagonal of A*A.  The
DFT uses the unitary (1/sqrt(n)) normalization so that A*A = I; the CDP
operator stacks unitary DFTs of the signal multiplied by K random masks, so
diag(A*A) = sum_j |M_j|^2 componentwise.  Im(diag(A*A)) = 0 holds for both,
which is what the closed-form x-update requires.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .signals import RngSpec, as_signal, _fmt

__all__ = [
    "UnitaryDFT",
    "CodedDiffraction",
    "make_octanary_masks",
    "OCTANARY_CANDIDATES",
    "masks_to_csv",
    "masks_from_csv",
    "masks_to_json",
    "masks_from_json",
]

_SQ2 = np.sqrt(2.0) / 2.0
_SQ3 = np.sqrt(3.0)

#: The eight admissible octanary mask values, |m|^2 in {1/2, 3}.
OCTANARY_CANDIDATES = np.array(
    [_SQ2, -_SQ2, 1j * _SQ2, -1j * _SQ2, _SQ3, -_SQ3, 1j * _SQ3, -1j * _SQ3],
    dtype=np.complex128,
)


class UnitaryDFT:
    """Normalized discrete Fourier transform, A*A = I."""

    kind = "dft"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = int(n)
        self.n_out = self.n

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.n,):
            raise ValueError(f"expected input of length {self.n}, got {x.shape}")
        return np.fft.fft(x, norm="ortho")

    def adjoint(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.complex128)
        if y.shape != (self.n_out,):
            raise ValueError(f"expected input of length {self.n_out}, got {y.shape}")
        return np.fft.ifft(y, norm="ortho")

    def gram_diagonal(self) -> np.ndarray:
        return np.ones(self.n)

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n, "k": None, "n_out": self.n_out}


class CodedDiffraction:
    """K-mask coded diffraction patterns: x -> (F(M_1 o x), ..., F(M_K o x))."""

    kind = "cdp"

    def __init__(self, masks):
        masks = np.asarray(masks, dtype=np.complex128)
        if masks.ndim == 1:
            masks = masks[None, :]
        if masks.ndim != 2 or masks.shape[0] < 1:
            raise ValueError("masks must be a (K, n) array with K >= 1")
        self.masks = masks
        self.k, self.n = masks.shape
        self.n_out = self.k * self.n
        self._gram = np.sum(np.abs(masks) ** 2, axis=0)
        self._conj_masks = np.conj(masks)

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.n,):
            raise ValueError(f"expected input of length {self.n}, got {x.shape}")
        return np.fft.fft(self.masks * x, norm="ortho", axis=1).ravel()

    def adjoint(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.complex128)
        if y.shape != (self.n_out,):
            raise ValueError(f"expected input of length {self.n_out}, got {y.shape}")
        blocks = np.fft.ifft(y.reshape(self.k, self.n), norm="ortho", axis=1)
        return np.sum(self._conj_masks * blocks, axis=0)

    def gram_diagonal(self) -> np.ndarray:
        return self._gram.copy()

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n, "k": self.k, "n_out": self.n_out}


def make_octanary_masks(k: int, n: int, rng: RngSpec) -> np.ndarray:
    """Draw K masks with entries i.i.d. uniform over the eight octanary values."""
    if k < 1:
        raise ValueError("k must be >= 1")
    gen = rng.generator()
    idx = gen.integers(0, 8, size=(k, n))
    return OCTANARY_CANDIDATES[idx]


def masks_to_csv(masks, path=None) -> str:
    """CSV with header ``mask_index,index,re,im``, one row per mask entry."""
    masks = np.asarray(masks, dtype=np.complex128)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mask_index", "index", "re", "im"])
    for j, mask in enumerate(masks):
        for i, v in enumerate(mask):
            w.writerow([j, i, _fmt(v.real), _fmt(v.imag)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def masks_to_json(masks, path=None) -> str:
    """JSON: one array of [re, im] pairs per mask, ordered by mask index."""
    import json

    masks = np.asarray(masks, dtype=np.complex128)
    text = json.dumps([[[v.real, v.imag] for v in mask] for mask in masks])
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def masks_from_json(source) -> np.ndarray:
    import json

    if isinstance(source, str) and not source.lstrip().startswith("["):
        with open(source) as f:
            source = f.read()
    data = json.loads(source)
    return np.array(
        [[complex(re, im) for re, im in mask] for mask in data], dtype=np.complex128
    )


def masks_from_csv(source) -> np.ndarray:
    if isinstance(source, str) and "\n" not in source:
        with open(source) as f:
            text = f.read()
    else:
        text = source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["mask_index", "index", "re", "im"]:
        raise ValueError("expected CSV header 'mask_index,index,re,im'")
    entries = {}
    for r in rows[1:]:
        if not r:
            continue
        entries[(int(r[0]), int(r[1]))] = complex(float(r[2]), float(r[3]))
    if not entries:
        raise ValueError("no mask entries found")
    k = max(j for j, _ in entries) + 1
    n = max(i for _, i in entries) + 1
    masks = np.zeros((k, n), dtype=np.complex128)
    for (j, i), v in entries.items():
        masks[j, i] = v
    return masks

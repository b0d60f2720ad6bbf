"""Complex signal utilities: validation, sparse ground truth, seeded RNG streams.

Signals are plain 1-D ``numpy`` arrays of ``complex128``.  Everything here is
immutable after construction and safe to share across trial workers.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RngSpec",
    "SparseGroundTruth",
    "as_signal",
    "l0_norm",
    "generate_sparse_signal",
    "signal_to_csv",
    "signal_from_csv",
    "signal_to_json",
    "signal_from_json",
]


@dataclass(frozen=True)
class RngSpec:
    """Seed plus substream id; identical (seed, stream) reproduces identical draws."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        )

    def substream(self, offset: int) -> "RngSpec":
        """Derive a sibling stream; distinct offsets give independent draws."""
        return RngSpec(self.seed, self.stream * 16 + offset)


def as_signal(values) -> np.ndarray:
    """Validate and return a finite complex128 vector of length >= 1."""
    x = np.asarray(values, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("signal must be a 1-D vector of length >= 1")
    if not np.isfinite(x).all():
        raise ValueError("signal contains NaN or Inf entries")
    return x


def l0_norm(x) -> int:
    """Number of nonzero entries: #{i : |Re x_i| + |Im x_i| != 0}, exact-zero test."""
    x = np.asarray(x)
    return int(np.count_nonzero(np.abs(x.real) + np.abs(x.imag)))


@dataclass(frozen=True)
class SparseGroundTruth:
    """An exactly sparse signal together with its support set."""

    signal: np.ndarray
    support: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "signal", as_signal(self.signal))
        object.__setattr__(self, "support", tuple(sorted(int(i) for i in self.support)))
        sig = self.signal
        on = np.zeros(sig.size, dtype=bool)
        on[list(self.support)] = True
        if np.any(sig[~on] != 0):
            raise ValueError("off-support entries must be exactly zero")
        if l0_norm(sig) != len(self.support):
            raise ValueError("support must match the nonzero set of the signal")

    @property
    def sparsity(self) -> int:
        return len(self.support)


def generate_sparse_signal(
    n: int, s: int, rng: RngSpec, complex_valued: bool = True
) -> SparseGroundTruth:
    """Draw an s-sparse length-n signal.

    The support is uniform without replacement; on-support values are i.i.d.
    standard complex Gaussian CN(0, 1), i.e. unit total variance with
    independent real and imaginary parts (plain N(0, 1) real Gaussian when
    ``complex_valued`` is false), redrawn on an exact zero so the L0 count is
    always s.
    """
    if not 1 <= s <= n:
        raise ValueError(f"sparsity s={s} must satisfy 1 <= s <= n={n}")
    gen = rng.generator()
    support = np.sort(gen.choice(n, size=s, replace=False))
    half = np.sqrt(0.5)
    values = np.empty(s, dtype=np.complex128)
    for i in range(s):
        v = 0.0
        while v == 0:
            if complex_valued:
                v = half * complex(gen.standard_normal(), gen.standard_normal())
            else:
                v = complex(gen.standard_normal())
        values[i] = v
    signal = np.zeros(n, dtype=np.complex128)
    signal[support] = values
    return SparseGroundTruth(signal=signal, support=tuple(int(i) for i in support))


def _fmt(v: float) -> str:
    # repr of a Python float is the shortest string that round-trips.
    return repr(float(v))


def signal_to_csv(x, path=None) -> str:
    """Serialize to CSV with header ``index,re,im``; round-trips bit-exactly."""
    x = as_signal(x)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i, v in enumerate(x):
        w.writerow([i, _fmt(v.real), _fmt(v.imag)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def signal_from_csv(source) -> np.ndarray:
    """Parse the ``index,re,im`` CSV format; accepts a path or CSV text."""
    if isinstance(source, str) and "\n" not in source:
        with open(source) as f:
            text = f.read()
    else:
        text = source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["index", "re", "im"]:
        raise ValueError("expected CSV header 'index,re,im'")
    values = [complex(float(r[1]), float(r[2])) for r in rows[1:] if r]
    return as_signal(values)


def magnitudes_to_csv(b, path=None) -> str:
    """Serialize a real measurement vector to CSV with header ``index,value``."""
    b = np.asarray(b, dtype=np.float64)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "value"])
    for i, v in enumerate(b):
        w.writerow([i, _fmt(v)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def magnitudes_from_csv(source) -> np.ndarray:
    if isinstance(source, str) and "\n" not in source:
        with open(source) as f:
            text = f.read()
    else:
        text = source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["index", "value"]:
        raise ValueError("expected CSV header 'index,value'")
    return np.array([float(r[1]) for r in rows[1:] if r], dtype=np.float64)


def signal_to_json(x, path=None) -> str:
    """Serialize to a JSON array of [re, im] pairs."""
    x = as_signal(x)
    text = json.dumps([[v.real, v.imag] for v in x])
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def signal_from_json(source) -> np.ndarray:
    if isinstance(source, str) and not source.lstrip().startswith("["):
        with open(source) as f:
            source = f.read()
    pairs = json.loads(source)
    return as_signal([complex(re, im) for re, im in pairs])

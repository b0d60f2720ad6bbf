"""Experiment engine: seeded sweeps over (N, sparsity, SNR, method, operator).

Every method at a sweep point consumes the identical (signal, masks, noise)
realization per trial index, so comparisons are paired by construction.
Per-trial seeds are a stable 64-bit hash of (base seed, sweep point, trial);
adding sweep points never perturbs the data of existing ones.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .fienup import SprConfig, spr_solve
from .metrics import (
    DEFAULT_SUCCESS_THRESHOLD,
    AlignmentPolicy,
    TrialResult,
    add_noise,
    nmse,
    recovery_probability,
)
from .operators import CodedDiffraction, UnitaryDFT, make_octanary_masks
from .signals import RngSpec, generate_sparse_signal, _fmt
from .solver import DivergedError, admm_solve, l0l1pr_config, l0l2pr_config

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "AggregateRow",
    "ResultTable",
    "run_experiment",
    "emit_results",
    "emit_figure_data",
    "parse_config_file",
    "make_experiment_config",
    "results_from_csv",
    "NOISE_LAMBDA",
]

METHODS = ("l0l2pr", "l0l1pr", "spr")

#: Regularization weight per method at the calibrated noise levels (SNR in dB).
NOISE_LAMBDA = {
    "l0l2pr": {40.0: 1.0e-4, 30.0: 5.0e-4, 20.0: 3.0e-3},
    "l0l1pr": {40.0: 2.0e-2, 30.0: 8.0e-3, 20.0: 1.5e-3},
}

#: SNR values at or above this are treated as noiseless.
NOISELESS_SNR = 1000.0


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    methods: tuple
    n_list: tuple
    s_list: tuple | None = None
    sr_list: tuple | None = None  # sparsity ratio in percent of n
    snr_list: tuple = (None,)  # None = noiseless
    operator: str = "dft"
    k_masks: int = 1
    trials: int = 100
    base_seed: int = 0
    success_threshold: float = DEFAULT_SUCCESS_THRESHOLD
    complex_valued: bool = True
    solver_overrides: dict = field(default_factory=dict)  # method -> field dict

    def validate(self):
        if not self.methods:
            raise ConfigError("methods: at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"methods: unknown method {m!r}")
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ConfigError("n_list: need at least one length >= 1")
        if (self.s_list is None) == (self.sr_list is None):
            raise ConfigError("s_list/sr_list: exactly one of them must be given")
        if self.s_list is not None and any(s < 1 for s in self.s_list):
            raise ConfigError("s_list: sparsities must be >= 1")
        if self.sr_list is not None and any(not 0 < sr <= 100 for sr in self.sr_list):
            raise ConfigError("sr_list: ratios are percentages in (0, 100]")
        if not self.snr_list:
            raise ConfigError("snr_list: must be nonempty (use None for noiseless)")
        if self.operator not in ("dft", "cdp"):
            raise ConfigError(f"operator: unknown operator {self.operator!r}")
        if self.k_masks < 1:
            raise ConfigError("k_masks: must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials: must be >= 1")
        if self.success_threshold <= 0:
            raise ConfigError("success_threshold: must be > 0")
        for m in self.solver_overrides:
            if m not in METHODS:
                raise ConfigError(f"solver_overrides.{m}: unknown method")
        # fail early on un-calibrated noisy runs without an explicit lambda
        for m in self.methods:
            if m == "spr":
                continue
            for snr in self.snr_list:
                _resolve_l0_config(m, snr, self.solver_overrides.get(m, {}))

    def sweep_points(self):
        """All (n, s, snr) combinations, s resolved from s_list or sr_list."""
        points = []
        for n in self.n_list:
            if self.s_list is not None:
                svals = list(self.s_list)
            else:
                svals = [max(1, round(sr / 100.0 * n)) for sr in self.sr_list]
            for s in svals:
                if s > n:
                    raise ConfigError(f"s_list: sparsity {s} exceeds n={n}")
                for snr in self.snr_list:
                    points.append((n, s, snr))
        return points


def _is_noisy(snr) -> bool:
    return snr is not None and snr < NOISELESS_SNR


def _resolve_l0_config(method: str, snr, overrides: dict):
    base = l0l2pr_config() if method == "l0l2pr" else l0l1pr_config()
    if _is_noisy(snr):
        lam = NOISE_LAMBDA[method].get(float(snr))
        if lam is None and "lam" not in overrides:
            raise ConfigError(
                f"solver_overrides.{method}.lam: SNR {snr} has no calibrated "
                "lambda; pass one explicitly"
            )
        base = replace(base, rho=1.0001, lam=lam if lam is not None else base.lam)
    return replace(base, **overrides) if overrides else base


def trial_seed(base_seed: int, n: int, s: int, snr, trial: int) -> int:
    """Stable 64-bit per-trial seed, independent of method and other points."""
    key = f"{base_seed}|{n}|{s}|{repr(snr)}|{trial}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def _run_point_trial(cfg: ExperimentConfig, n: int, s: int, snr, trial: int):
    seed = trial_seed(cfg.base_seed, n, s, snr, trial)
    truth = generate_sparse_signal(n, s, RngSpec(seed, 0), cfg.complex_valued)
    if cfg.operator == "cdp":
        masks = make_octanary_masks(cfg.k_masks, n, RngSpec(seed, 1))
        op = CodedDiffraction(masks)
        policy = AlignmentPolicy.phase_only()
        k_masks = cfg.k_masks
    else:
        op = UnitaryDFT(n)
        policy = AlignmentPolicy.fourier()
        k_masks = 0
    b = np.abs(op.forward(truth.signal))
    if _is_noisy(snr):
        b = add_noise(b, float(snr), RngSpec(seed, 2))

    rows = []
    for i, method in enumerate(cfg.methods):
        init_rng = RngSpec(seed, 3 + i)
        start = time.perf_counter()
        iterations = 0
        estimate = None
        try:
            if method == "spr":
                overrides = dict(cfg.solver_overrides.get("spr", {}))
                spr_cfg = SprConfig(s=s, rng=init_rng, **overrides)
                estimate, iterations = spr_solve(b, spr_cfg)
            else:
                scfg = _resolve_l0_config(
                    method, snr, cfg.solver_overrides.get(method, {})
                )
                scfg = replace(scfg, rng=init_rng)
                estimate, diag = admm_solve(op, b, scfg)
                iterations = diag.iterations
        except DivergedError as err:
            iterations = err.state.n
        elapsed = time.perf_counter() - start
        if estimate is None:
            err_val, success = math.inf, False
        else:
            err_val = float(nmse(estimate, truth.signal, policy))
            success = bool(err_val <= cfg.success_threshold)
        rows.append(
            TrialResult(
                method=method,
                n=n,
                s=s,
                snr=None if snr is None else float(snr),
                k_masks=k_masks,
                seed=seed,
                nmse=err_val,
                success=success,
                iterations=iterations,
                wall_time_s=elapsed,
            )
        )
    return rows


def _worker(args):
    return _run_point_trial(*args)


@dataclass(frozen=True)
class AggregateRow:
    method: str
    n: int
    s: int
    sr: float
    snr: float | None
    k_masks: int
    trials: int
    recovery_probability: float
    mean_nmse: float
    mean_runtime_s: float | None  # averaged over successful trials only


@dataclass
class ResultTable:
    rows: list
    aggregates: list


def _aggregate(rows) -> list:
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.method, r.n, r.s, r.snr, r.k_masks), []).append(r)
    out = []
    for (method, n, s, snr, k_masks), rs in groups.items():
        succ = [r for r in rs if r.success]
        out.append(
            AggregateRow(
                method=method,
                n=n,
                s=s,
                sr=100.0 * s / n,
                snr=snr,
                k_masks=k_masks,
                trials=len(rs),
                recovery_probability=recovery_probability(rs),
                mean_nmse=float(np.mean([r.nmse for r in rs])),
                mean_runtime_s=(
                    float(np.mean([r.wall_time_s for r in succ])) if succ else None
                ),
            )
        )
    return out


def _worker_count() -> int:
    cap = os.environ.get("SPARSE_PR_THREADS")
    if cap is not None:
        return max(1, int(cap))
    return os.cpu_count() or 1


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Run the full sweep; rows are ordered by (sweep point, trial, method)."""
    cfg.validate()
    tasks = [
        (cfg, n, s, snr, trial)
        for (n, s, snr) in cfg.sweep_points()
        for trial in range(cfg.trials)
    ]
    workers = _worker_count()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_worker, tasks, chunksize=1))
    else:
        chunks = [_run_point_trial(*t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    return ResultTable(rows=rows, aggregates=_aggregate(rows))


# ---------------------------------------------------------------------------
# serialization

_ROW_COLUMNS = (
    "method",
    "n",
    "s",
    "snr",
    "k_masks",
    "seed",
    "nmse",
    "success",
    "iterations",
    "wall_time_s",
)

_AGG_COLUMNS = (
    "method",
    "n",
    "s",
    "sr",
    "snr",
    "k_masks",
    "trials",
    "recovery_probability",
    "mean_nmse",
    "mean_runtime_s",
)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


def _rows_csv(rows, include_timing: bool) -> str:
    cols = _ROW_COLUMNS if include_timing else _ROW_COLUMNS[:-1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(getattr(r, c)) for c in cols])
    return buf.getvalue()


def _aggregates_csv(aggregates, include_timing: bool) -> str:
    cols = _AGG_COLUMNS if include_timing else _AGG_COLUMNS[:-1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for a in aggregates:
        w.writerow([_cell(getattr(a, c)) for c in cols])
    return buf.getvalue()


def aggregate_path(path: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}.aggregate{ext or '.csv'}"


def emit_results(table: ResultTable, fmt: str, path, include_timing: bool = True):
    """Write trial rows plus aggregates; CSV uses two files, JSON mirrors both."""
    path = os.fspath(path)
    try:
        if fmt == "csv":
            with open(path, "w") as f:
                f.write(_rows_csv(table.rows, include_timing))
            with open(aggregate_path(path), "w") as f:
                f.write(_aggregates_csv(table.aggregates, include_timing))
        elif fmt == "json":
            row_cols = _ROW_COLUMNS if include_timing else _ROW_COLUMNS[:-1]
            agg_cols = _AGG_COLUMNS if include_timing else _AGG_COLUMNS[:-1]
            payload = {
                "rows": [{c: getattr(r, c) for c in row_cols} for r in table.rows],
                "aggregates": [
                    {c: getattr(a, c) for c in agg_cols} for a in table.aggregates
                ],
            }
            with open(path, "w") as f:
                json.dump(payload, f)
                f.write("\n")
        else:
            raise ValueError(f"unknown output format {fmt!r}")
    except OSError as err:
        raise OSError(f"failed writing results to {path}: {err}") from err


def results_from_csv(source) -> list:
    """Parse a trial-row CSV back into TrialResult objects."""
    if isinstance(source, str) and "\n" not in source:
        with open(source) as f:
            text = f.read()
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = []
    for rec in reader:
        if not rec:
            continue
        d = dict(zip(header, rec))
        rows.append(
            TrialResult(
                method=d["method"],
                n=int(d["n"]),
                s=int(d["s"]),
                snr=None if d["snr"] == "" else float(d["snr"]),
                k_masks=int(d["k_masks"]),
                seed=int(d["seed"]),
                nmse=float(d["nmse"]),
                success=d["success"] == "true",
                iterations=int(d["iterations"]),
                wall_time_s=float(d.get("wall_time_s", 0.0) or 0.0),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# figure data

_FIGURE_KINDS = {
    "prob_vs_sparsity": "recovery_probability",
    "nmse_vs_sparsity": "mean_nmse",
    "time_vs_sparsity": "mean_runtime_s",
    "time_vs_length": "mean_runtime_s",
}


def emit_figure_data(table: ResultTable, directory) -> list:
    """Write one aggregate CSV per figure recipe; returns the written paths."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for kind, value_col in _FIGURE_KINDS.items():
        path = os.path.join(directory, f"{kind}.csv")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "n", "s", "sr", "snr", "k_masks", value_col])
        for a in sorted(
            table.aggregates, key=lambda a: (a.method, a.n, a.s, a.snr or 0.0)
        ):
            value = getattr(a, value_col)
            if value is None:
                continue
            w.writerow(
                [
                    a.method,
                    a.n,
                    a.s,
                    _fmt(a.sr),
                    _cell(a.snr),
                    a.k_masks,
                    _fmt(value),
                ]
            )
        with open(path, "w") as f:
            f.write(buf.getvalue())
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# flat key=value config files

_LIST_KEYS = {"methods", "n", "s", "sr", "snr"}


def parse_config_file(path) -> dict:
    """Flat key = value text; '#' starts a comment, lists are comma separated."""
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _parse_list(text, conv):
    return tuple(conv(part.strip()) for part in str(text).split(",") if part.strip())


def make_experiment_config(values: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from string-valued settings (file or flags).

    Recognized keys: methods, operator, k_masks, n, s, sr, snr, trials, seed,
    lambda, rho, r1_0, r2_0, max_iters, success_threshold, real_valued.
    The solver keys apply to every L0 method in the run.
    """
    known = {
        "methods", "operator", "k_masks", "n", "s", "sr", "snr", "trials",
        "seed", "lambda", "rho", "r1_0", "r2_0", "max_iters",
        "success_threshold", "real_valued",
    }
    for key in values:
        if key not in known:
            raise ConfigError(f"{key}: unknown configuration key")
    if "methods" not in values:
        raise ConfigError("methods: required")
    if "n" not in values:
        raise ConfigError("n: required")

    def parse_snr(txt):
        if txt.lower() in ("none", "noiseless", "inf"):
            return None
        return float(txt)

    overrides = {}
    for key, fname in (
        ("lambda", "lam"),
        ("rho", "rho"),
        ("r1_0", "r1_0"),
        ("r2_0", "r2_0"),
    ):
        if key in values:
            overrides[fname] = float(values[key])
    if "max_iters" in values:
        overrides["max_iters"] = int(values["max_iters"])

    methods = _parse_list(values["methods"], str)
    solver_overrides = {m: dict(overrides) for m in methods if m != "spr"}
    cfg = ExperimentConfig(
        methods=methods,
        n_list=_parse_list(values["n"], int),
        s_list=_parse_list(values["s"], int) if "s" in values else None,
        sr_list=_parse_list(values["sr"], float) if "sr" in values else None,
        snr_list=(
            _parse_list(values["snr"], parse_snr) if "snr" in values else (None,)
        ),
        operator=values.get("operator", "dft"),
        k_masks=int(values.get("k_masks", 1)),
        trials=int(values.get("trials", 100)),
        base_seed=int(values.get("seed", 0)),
        success_threshold=float(
            values.get("success_threshold", DEFAULT_SUCCESS_THRESHOLD)
        ),
        complex_valued=str(values.get("real_valued", "false")).lower()
        not in ("true", "1", "yes"),
        solver_overrides=solver_overrides,
    )
    cfg.validate()
    return cfg

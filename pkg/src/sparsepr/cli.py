"""Command line front end.

Subcommands:
  solve   recover one instance from a measurement file and report diagnostics
  bench   run an experiment sweep (config file and/or flag overrides)
  masks   generate and save octanary CDP masks
  oracle  evaluate the brute-force kernel oracles for reference values

Exit codes: 0 success, 1 runtime error, 2 configuration/usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import bench, oracles
from .bench import ConfigError
from .fienup import SprConfig, spr_solve
from .metrics import AlignmentPolicy, nmse
from .operators import (
    CodedDiffraction,
    UnitaryDFT,
    make_octanary_masks,
    masks_from_csv,
    masks_from_json,
    masks_to_csv,
    masks_to_json,
)
from .signals import (
    RngSpec,
    _fmt,
    magnitudes_from_csv,
    signal_from_csv,
    signal_to_csv,
)
from .solver import (
    DivergedError,
    admm_solve,
    energy,
    kkt_residuals,
    l0l1pr_config,
    l0l2pr_config,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsepr",
        description="Sparse phase retrieval: L0-regularized ADMM solvers and benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="recover one instance from files")
    p_solve.add_argument("--measurements", required=True, help="CSV (index,value)")
    p_solve.add_argument("--operator", choices=["dft", "cdp"], default="dft")
    p_solve.add_argument("--masks", help="mask CSV/JSON file (required for cdp)")
    p_solve.add_argument(
        "--method", choices=["l0l2pr", "l0l1pr", "spr"], default="l0l1pr"
    )
    p_solve.add_argument("--truth", help="ground-truth signal CSV for NMSE")
    p_solve.add_argument(
        "--no-noise",
        action="store_true",
        help="assert the measurements are clean (reject negative entries)",
    )
    p_solve.add_argument("--s", type=int, help="sparsity budget (spr only)")
    p_solve.add_argument("--lambda", dest="lam", type=float)
    p_solve.add_argument("--rho", type=float)
    p_solve.add_argument("--r1-0", dest="r1_0", type=float)
    p_solve.add_argument("--r2-0", dest="r2_0", type=float)
    p_solve.add_argument("--max-iters", type=int)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--out", help="write the recovered signal CSV here")
    p_solve.add_argument("--trace-out", help="write iteration/energy trace CSV here")
    p_solve.add_argument("--diagnostics-out", help="write diagnostics JSON here")

    p_bench = sub.add_parser("bench", help="run an experiment sweep")
    p_bench.add_argument("--config", help="flat key = value config file")
    p_bench.add_argument("--method", action="append", help="repeatable")
    p_bench.add_argument("--operator", choices=["dft", "cdp"])
    p_bench.add_argument("--k-masks", type=int)
    p_bench.add_argument("--n", help="comma-separated lengths")
    p_bench.add_argument("--s", help="comma-separated sparsities")
    p_bench.add_argument("--sr", help="comma-separated sparsity ratios (percent)")
    p_bench.add_argument("--snr", help="comma-separated SNRs in dB ('none' = clean)")
    p_bench.add_argument("--trials", type=int)
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--lambda", dest="lam", type=float)
    p_bench.add_argument("--rho", type=float)
    p_bench.add_argument("--r1-0", dest="r1_0", type=float)
    p_bench.add_argument("--r2-0", dest="r2_0", type=float)
    p_bench.add_argument("--max-iters", type=int)
    p_bench.add_argument("--success-threshold", type=float)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--format", choices=["csv", "json"], default="csv")
    p_bench.add_argument(
        "--no-timing",
        action="store_true",
        help="omit wall-time columns for byte-stable comparisons",
    )
    p_bench.add_argument(
        "--emit-figure-data",
        metavar="DIR",
        help="also write per-figure aggregate CSVs into DIR",
    )

    p_masks = sub.add_parser("masks", help="generate octanary CDP masks")
    p_masks.add_argument("--k", type=int, required=True)
    p_masks.add_argument("--n", type=int, required=True)
    p_masks.add_argument("--seed", type=int, default=0)
    p_masks.add_argument("--out", required=True)
    p_masks.add_argument("--format", choices=["csv", "json"], default="csv")

    p_oracle = sub.add_parser("oracle", help="run the grid-search kernel oracles")
    p_oracle.add_argument(
        "--kernel",
        required=True,
        choices=[
            "magnitude-fit-l2",
            "magnitude-fit-l1",
            "constrained-soft-threshold",
            "hard-threshold",
        ],
    )
    p_oracle.add_argument("--w", type=float, help="|W| (magnitude fits)")
    p_oracle.add_argument("--b", type=float, help="observed magnitude")
    p_oracle.add_argument("--r2", type=float, help="penalty weight")
    p_oracle.add_argument("--y0", type=float)
    p_oracle.add_argument("--y1", type=float)
    p_oracle.add_argument("--r", type=float)
    p_oracle.add_argument("--v-re", type=float, default=0.0)
    p_oracle.add_argument("--v-im", type=float, default=0.0)
    p_oracle.add_argument("--r1", type=float)
    p_oracle.add_argument("--lambda", dest="lam", type=float)
    return parser


def _load_masks(path):
    if path.endswith(".json"):
        return masks_from_json(path)
    return masks_from_csv(path)


def _cmd_solve(args) -> int:
    b = magnitudes_from_csv(args.measurements)
    if args.no_noise and np.any(b < 0):
        print("error: --no-noise set but measurements contain negative entries",
              file=sys.stderr)
        return 2
    if args.operator == "cdp":
        if not args.masks:
            print("error: --masks is required for the cdp operator", file=sys.stderr)
            return 2
        op = CodedDiffraction(_load_masks(args.masks))
        policy = AlignmentPolicy.phase_only()
    else:
        op = UnitaryDFT(b.size)
        policy = AlignmentPolicy.fourier()
    if b.size != op.n_out:
        print(f"error: measurement length {b.size} does not match operator "
              f"output length {op.n_out}", file=sys.stderr)
        return 2

    rng = RngSpec(args.seed)
    if args.method == "spr":
        if args.s is None:
            print("error: --s is required for spr", file=sys.stderr)
            return 2
        if args.operator != "dft":
            print("error: spr supports only the dft operator", file=sys.stderr)
            return 2
        cfg = SprConfig(s=args.s, rng=rng)
        estimate, iterations = spr_solve(b, cfg)
        print(f"method=spr iterations={iterations}")
    else:
        cfg = l0l2pr_config() if args.method == "l0l2pr" else l0l1pr_config()
        overrides = {
            k: v
            for k, v in (
                ("lam", args.lam),
                ("rho", args.rho),
                ("r1_0", args.r1_0),
                ("r2_0", args.r2_0),
                ("max_iters", args.max_iters),
            )
            if v is not None
        }
        from dataclasses import replace

        cfg = replace(cfg, rng=rng, **overrides)
        trace = []
        try:
            estimate, diag = admm_solve(
                op, b, cfg, callback=lambda n, e, res: trace.append((n, e, *res))
            )
        except DivergedError as err:
            print(f"error: solver diverged at iteration {err.state.n}",
                  file=sys.stderr)
            return 1
        state = diag.state
        res = kkt_residuals(state, op)
        final_energy = energy(estimate, state.z, b, cfg.lam, cfg.p)
        print(f"method={args.method} iterations={diag.iterations} "
              f"energy={final_energy:.6g} "
              f"kkt=({res[0]:.3g},{res[1]:.3g},{res[2]:.3g}) "
              f"wall_time_s={diag.wall_time:.3f}")
        if args.trace_out:
            with open(args.trace_out, "w") as f:
                w = csv.writer(f, lineterminator="\n")
                w.writerow(["iteration", "energy", "res_x", "res_z"])
                for n, e, rx, rz in trace:
                    w.writerow([n, _fmt(e), _fmt(rx), _fmt(rz)])
        if args.diagnostics_out:
            with open(args.diagnostics_out, "w") as f:
                f.write(diag.to_json())
                f.write("\n")

    if args.truth:
        truth = signal_from_csv(args.truth)
        err = nmse(estimate, truth, policy)
        print(f"nmse={err:.6g}")
    if args.out:
        signal_to_csv(estimate, args.out)
    return 0


def _cmd_bench(args) -> int:
    values = bench.parse_config_file(args.config) if args.config else {}
    if args.method:
        values["methods"] = ",".join(args.method)
    for key, val in (
        ("operator", args.operator),
        ("k_masks", args.k_masks),
        ("n", args.n),
        ("s", args.s),
        ("sr", args.sr),
        ("snr", args.snr),
        ("trials", args.trials),
        ("seed", args.seed),
        ("lambda", args.lam),
        ("rho", args.rho),
        ("r1_0", args.r1_0),
        ("r2_0", args.r2_0),
        ("max_iters", args.max_iters),
        ("success_threshold", args.success_threshold),
    ):
        if val is not None:
            values[key] = str(val)
    cfg = bench.make_experiment_config(values)
    table = bench.run_experiment(cfg)
    bench.emit_results(table, args.format, args.out, include_timing=not args.no_timing)
    if args.emit_figure_data:
        bench.emit_figure_data(table, args.emit_figure_data)
    for agg in table.aggregates:
        snr = "clean" if agg.snr is None else f"{agg.snr:g}dB"
        mean_rt = "n/a" if agg.mean_runtime_s is None else f"{agg.mean_runtime_s:.3f}s"
        print(f"{agg.method} n={agg.n} s={agg.s} snr={snr}: "
              f"recovery={agg.recovery_probability:.2f} "
              f"mean_nmse={agg.mean_nmse:.3g} mean_runtime={mean_rt}")
    return 0


def _cmd_masks(args) -> int:
    masks = make_octanary_masks(args.k, args.n, RngSpec(args.seed))
    if args.format == "json":
        masks_to_json(masks, args.out)
    else:
        masks_to_csv(masks, args.out)
    print(f"wrote {args.k} masks of length {args.n} to {args.out}")
    return 0


def _require(args, names) -> list:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ConfigError(f"oracle --kernel {args.kernel} requires {flags}")
    return [getattr(args, n) for n in names]


def _cmd_oracle(args) -> int:
    if args.kernel == "magnitude-fit-l2":
        w, b, r2 = _require(args, ["w", "b", "r2"])
        argmin, value = oracles.oracle_magnitude_fit_l2(w, b, r2)
    elif args.kernel == "magnitude-fit-l1":
        w, b, r2 = _require(args, ["w", "b", "r2"])
        argmin, value = oracles.oracle_magnitude_fit_l1(w, b, r2)
    elif args.kernel == "constrained-soft-threshold":
        y0, y1, r = _require(args, ["y0", "y1", "r"])
        argmin, value = oracles.oracle_constrained_soft_threshold(y0, y1, r)
    else:  # hard-threshold
        r1, lam = _require(args, ["r1", "lam"])
        q, value = oracles.oracle_hard_threshold(complex(args.v_re, args.v_im), r1, lam)
        argmin = [q.real, q.imag]
    print(json.dumps({"kernel": args.kernel, "argmin": argmin, "value": value}))
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "masks":
            return _cmd_masks(args)
        return _cmd_oracle(args)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())

"""Recovery probability versus sparsity level, with figure output.

Sweeps the sparsity of a length-128 signal, estimates recovery probability
for the ADMM solver and the sparse-Fienup baseline from a few paired trials
per point, and (if figgen is installed) renders the probability curve.
About five minutes on one core; raise `trials` for smoother curves.
"""

import os

from sparsepr import ExperimentConfig, emit_figure_data, emit_results, run_experiment

cfg = ExperimentConfig(
    methods=("l0l1pr", "spr"),
    n_list=(128,),
    s_list=(5, 10, 15, 20, 25),
    trials=8,
    base_seed=1,
)

table = run_experiment(cfg)

print("method     s   recovery  mean NMSE")
for agg in sorted(table.aggregates, key=lambda a: (a.method, a.s)):
    print(
        f"{agg.method:8} {agg.s:3d}   {agg.recovery_probability:8.2f}  "
        f"{agg.mean_nmse:.3g}"
    )

outdir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(outdir, exist_ok=True)
emit_results(table, "csv", os.path.join(outdir, "phase_transition.csv"))
emit_figure_data(table, outdir)
print(f"\nwrote trial rows and figure CSVs to {outdir}/")

try:
    from figgen import FigureSpec, render
except ImportError:
    print("figgen not installed; skipping the plot")
else:
    spec = FigureSpec(
        kind="prob_vs_sparsity",
        input=os.path.join(outdir, "prob_vs_sparsity.csv"),
        output=os.path.join(outdir, "phase_transition.png"),
        title="Recovery probability versus sparsity (N=128)",
    )
    render(spec)
    print(f"rendered {spec.output} (+ sidecar JSON)")

"""Sparse phase retrieval: L0-regularized ADMM solvers, a sparse-Fienup
baseline, Fourier/CDP measurement operators and a benchmark harness."""

from .bench import (
    ExperimentConfig,
    ResultTable,
    emit_figure_data,
    emit_results,
    run_experiment,
)
from .fienup import SprConfig, project_magnitude, project_sparsity, spr_solve
from .kernels import (
    constrained_soft_threshold,
    hard_threshold_q,
    magnitude_fit_l1,
    magnitude_fit_l2,
    update_x,
    update_z,
)
from .metrics import (
    AlignmentPolicy,
    TrialResult,
    add_noise,
    measure_snr,
    nmse,
    recovery_probability,
)
from .operators import CodedDiffraction, UnitaryDFT, make_octanary_masks
from .signals import RngSpec, SparseGroundTruth, generate_sparse_signal, l0_norm
from .solver import (
    Diagnostics,
    DivergedError,
    SolverConfig,
    SolverState,
    admm_solve,
    cdp_config,
    energy,
    initialize,
    kkt_residuals,
    l0l1pr_config,
    l0l2pr_config,
    planned_iterations,
)

__version__ = "0.1.0"

"""L2 metrics, evaluation harness, sweeps and curve artifacts."""

from .metrics import L2Stats, M_TO_CM, l2_error
from .harness import EvalReport, eval_checkpoints, eval_model, eval_single, predict_dense
from .plotting import write_curve_svg
from .sweep import (
    CONDITIONED_SPARSITIES_S,
    EVAL_STRIDES_4S,
    LONG_HORIZON_SPARSITIES_S,
    TRAIN_SPARSITIES_S,
    SweepCell,
    SweepResult,
    build_experiment_cells,
    run_sweep,
    seconds_to_steps,
)

__all__ = [
    "L2Stats", "M_TO_CM", "l2_error",
    "EvalReport", "eval_checkpoints", "eval_model", "eval_single", "predict_dense",
    "write_curve_svg",
    "CONDITIONED_SPARSITIES_S", "EVAL_STRIDES_4S", "LONG_HORIZON_SPARSITIES_S",
    "TRAIN_SPARSITIES_S", "SweepCell", "SweepResult", "build_experiment_cells",
    "run_sweep", "seconds_to_steps",
]

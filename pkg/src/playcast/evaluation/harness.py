"""Evaluation harness: dense scoring plus evaluation-time sparsification.

A trained model is always asked for dense output first; an evaluation
stride above one then discards all but every stride-th prediction and
re-interpolates with the constant-acceleration motion model (anchored at
the observed past), exactly like applying the sparse-output trick to a
finished model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..diff import no_grad
from ..models.api import forward_densified, load_model
from ..models.densify import densify_controls_np
from ..models.scene import arrays_to_batch, batch_anchor_state, out_agent_slice
from ..motion import control_offsets
from ..training.config import SplitArrays
from .metrics import L2Stats, l2_error


@dataclass
class EvalReport:
    """Seed-aggregated L2 statistics for one model/evaluation setting."""

    per_step_cm: np.ndarray
    cumulative_cm: np.ndarray
    overall_cm: float
    std_cm: float
    per_seed_overall: dict[int, float]
    provenance: dict = field(default_factory=dict)


def predict_dense(model, split: SplitArrays, eval_stride: int = 1, order: int = 2,
                  batch_size: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Dense predictions (after optional eval-time sparsify+densify) and targets."""
    if eval_stride < 1:
        raise ValueError(f"eval_stride must be >= 1, got {eval_stride}")
    spec = model.spec
    preds, targets = [], []
    with no_grad():
        for start in range(0, split.n_windows, batch_size):
            past = split.past[start:start + batch_size]
            future = split.future[start:start + batch_size]
            batch, target = arrays_to_batch(past, future, spec)
            dense = forward_densified(model, batch, training=False).data
            if eval_stride > 1:
                offsets = control_offsets(spec.horizon, eval_stride)
                controls = dense[:, :, np.asarray(offsets) - 1, :]
                pos, derivs = batch_anchor_state(past[:, out_agent_slice(spec)], order)
                dense = densify_controls_np(controls, offsets, pos, derivs, order)
            preds.append(dense)
            targets.append(target)
    return np.concatenate(preds), np.concatenate(targets)


def eval_single(model, split: SplitArrays, eval_stride: int = 1, order: int = 2,
                batch_size: int = 256) -> L2Stats:
    pred, target = predict_dense(model, split, eval_stride, order, batch_size)
    return l2_error(target, pred)


def eval_model(models: dict[int, object], split: SplitArrays, eval_stride: int = 1,
               order: int = 2, batch_size: int = 256,
               provenance: dict | None = None) -> EvalReport:
    """Score one model per seed and aggregate as mean +- std across seeds."""
    if not models:
        raise ValueError("no models to evaluate")
    per_seed: dict[int, L2Stats] = {
        seed: eval_single(m, split, eval_stride, order, batch_size)
        for seed, m in models.items()
    }
    stacked = np.stack([s.per_step_cm for s in per_seed.values()])
    per_step = stacked.mean(axis=0)
    cumulative = np.cumsum(per_step) / np.arange(1, per_step.size + 1)
    overalls = np.array([s.overall_cm for s in per_seed.values()])
    return EvalReport(
        per_step_cm=per_step,
        cumulative_cm=cumulative,
        overall_cm=float(overalls.mean()),
        std_cm=float(overalls.std(ddof=1)) if overalls.size > 1 else 0.0,
        per_seed_overall={s: st.overall_cm for s, st in per_seed.items()},
        provenance=dict(provenance or {}, eval_stride=eval_stride, order=order),
    )


def eval_checkpoints(paths: list, split: SplitArrays, eval_stride: int = 1,
                     order: int = 2, batch_size: int = 256) -> EvalReport:
    models = {}
    for path in paths:
        model, meta = load_model(path)
        models[int(meta.get("seed", len(models)))] = model
    return eval_model(models, split, eval_stride, order, batch_size,
                      provenance={"checkpoints": [str(p) for p in paths]})

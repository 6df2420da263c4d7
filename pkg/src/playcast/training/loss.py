"""Training objective: Huber averaged over trajectories and timesteps."""

from __future__ import annotations

import numpy as np

from ..diff import ShapeError, Tensor, as_tensor, huber_elementwise, mean_reduce


def huber_loss(target: np.ndarray, prediction) -> Tensor:
    """Mean over trajectories/steps of the per-point 2D Huber cost.

    The per-point cost halves the sum over the two coordinates of the
    elementwise Huber (quadratic inside one meter, linear outside).
    ``prediction`` may be an autodiff tensor (training path) or an array.
    Shapes are (..., steps, 2) and must match exactly.
    """
    pred = as_tensor(prediction)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape or pred.shape[-1] != 2:
        raise ShapeError(f"huber_loss: prediction {pred.shape} vs target {target.shape}")
    per_coord = huber_elementwise(pred, target)
    per_point = per_coord.sum(axis=-1) * 0.5
    return mean_reduce(per_point)

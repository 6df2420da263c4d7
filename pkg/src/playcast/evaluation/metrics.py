"""L2 test metrics. Internal math is in meters; reports are in cm."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

M_TO_CM = 100.0


@dataclass
class L2Stats:
    """Per-timestep and aggregate Euclidean error for one model run."""

    per_step_cm: np.ndarray    # (horizon,) mean over examples and agents
    overall_cm: float          # mean over examples, trajectories and steps
    cumulative_cm: np.ndarray  # running mean of per-step errors


def l2_error(target: np.ndarray, prediction: np.ndarray) -> L2Stats:
    """Euclidean distance per agent per step, averaged per step and overall.

    Shapes are (..., agents, steps, 2) or (agents, steps, 2) and must match.
    """
    target = np.asarray(target, dtype=np.float64)
    prediction = np.asarray(prediction, dtype=np.float64)
    if target.shape != prediction.shape:
        raise ValueError(f"l2_error: shapes {prediction.shape} vs {target.shape}")
    dist = np.linalg.norm(prediction - target, axis=-1) * M_TO_CM
    step_axis = dist.ndim - 1
    other = tuple(range(step_axis))
    per_step = dist.mean(axis=other) if other else dist
    cumulative = np.cumsum(per_step) / np.arange(1, per_step.size + 1)
    return L2Stats(per_step_cm=per_step, overall_cm=float(per_step.mean()),
                   cumulative_cm=cumulative)

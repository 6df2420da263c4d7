"""Differentiable densification of model control points.

Thin tensor-backend wrapper over the interpolation core in
:mod:`playcast.motion`; the anchor state comes from observed data (it is a
constant), so gradients flow from every dense output back to the control
points only.
"""

from __future__ import annotations

import numpy as np

from ..diff import Tensor, concat
from ..motion import chain_control_segments


class _TensorOps:
    @staticmethod
    def expand(x):
        if isinstance(x, Tensor):
            return x.reshape(x.shape + (1,))
        return np.asarray(x, dtype=np.float64)[..., None]

    @staticmethod
    def concat_time(pieces):
        return concat(pieces, axis=-1)


def densify_controls(controls: Tensor, offsets: list[int], anchor_pos: np.ndarray,
                     anchor_derivs: tuple, order: int) -> Tensor:
    """Interpolate (B, A, K, 2) control points into (B, A, H, 2) positions.

    Stride-1 heads are returned as-is: every segment has duration one and
    endpoint pass-through makes the interpolation the identity there.
    """
    horizon = offsets[-1]
    if offsets == list(range(1, horizon + 1)):
        return controls
    k = controls.shape[2]
    if k != len(offsets):
        raise ValueError(f"controls have {k} steps but {len(offsets)} offsets given")
    targets = [controls[:, :, i, :] for i in range(k)]
    durations = [offsets[0]] + [b - a for a, b in zip(offsets, offsets[1:])]
    positions, _, _ = chain_control_segments(
        _TensorOps, anchor_pos, anchor_derivs, targets, durations, order)
    return positions.transpose((0, 1, 3, 2))  # (B, A, 2, H) -> (B, A, H, 2)


def densify_controls_np(controls: np.ndarray, offsets: list[int], anchor_pos: np.ndarray,
                        anchor_derivs: tuple, order: int) -> np.ndarray:
    """Numpy twin of :func:`densify_controls` for evaluation-time use."""
    horizon = offsets[-1]
    if offsets == list(range(1, horizon + 1)):
        return np.asarray(controls, dtype=np.float64)
    controls = np.asarray(controls, dtype=np.float64)
    targets = [controls[..., i, :] for i in range(controls.shape[-2])]
    durations = [offsets[0]] + [b - a for a, b in zip(offsets, offsets[1:])]

    class _NpOps:
        @staticmethod
        def expand(x):
            return np.asarray(x, dtype=np.float64)[..., None]

        @staticmethod
        def concat_time(pieces):
            return np.concatenate(pieces, axis=-1)

    positions, _, _ = chain_control_segments(
        _NpOps, anchor_pos, anchor_derivs, targets, durations, order)
    return np.moveaxis(positions, -1, -2)  # (..., 2, H) -> (..., H, 2)

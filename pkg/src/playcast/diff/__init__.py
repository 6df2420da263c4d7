"""Minimal differentiable-computation substrate for the trajectory models."""

from .tensor import DTYPE, ShapeError, Tensor, as_tensor, concat, matmul, no_grad, stack, zeros
from .nn import (
    MLP,
    BatchNormState,
    GRUCellParams,
    Parameter,
    batch_norm,
    causal_conv1d,
    dense_affine,
    gru_cell,
    huber_elementwise,
    mean_reduce,
    relu,
    scaled_dot_attention,
    softmax,
    sum_over_set,
    uniform_fan_in,
)
from .optim import Adam, GradientNaNError
from .gradcheck import GradCheckReport, grad_check
from .checkpoint import CheckpointError, config_hash, load_checkpoint, save_checkpoint

__all__ = [
    "DTYPE", "ShapeError", "Tensor", "as_tensor", "concat", "matmul", "no_grad", "stack", "zeros",
    "MLP", "BatchNormState", "GRUCellParams", "Parameter", "batch_norm", "causal_conv1d",
    "dense_affine", "gru_cell", "huber_elementwise", "mean_reduce", "relu",
    "scaled_dot_attention", "softmax", "sum_over_set", "uniform_fan_in",
    "Adam", "GradientNaNError", "GradCheckReport", "grad_check",
    "CheckpointError", "config_hash", "load_checkpoint", "save_checkpoint",
]

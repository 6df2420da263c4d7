"""Neural-network primitives with reverse-mode gradients.

The operation set is exactly what the predictors need: dense affine layers
(optionally grouped over leading axes), ReLU, batch normalization with
train/eval modes, softmax, multi-head scaled dot-product attention, a GRU
cell, causal 1D convolution, concatenation, set summation, elementwise
Huber and mean reduction. Everything composes the tape ops from
:mod:`playcast.diff.tensor`, so gradients come for free and can be checked
against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensor import DTYPE, ShapeError, Tensor, as_tensor, concat, matmul
from .tensor import relu as _relu


class Parameter(Tensor):
    """A named leaf tensor updated by the optimizer."""

    __slots__ = ()

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True, name=name)

    def zero_grad(self) -> None:
        self.grad = None


def uniform_fan_in(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization."""
    bound = 1.0 / math.sqrt(max(1, fan_in))
    return rng.uniform(-bound, bound, size=shape).astype(DTYPE)


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------


def dense_affine(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """``x @ weight + bias``.

    ``x`` has features on the last axis. ``weight`` is ``(in, out)``; extra
    leading axes on ``weight`` broadcast against ``x`` (grouped affine, one
    weight matrix per group).
    """
    x = as_tensor(x)
    weight = as_tensor(weight)
    if x.shape[-1] != weight.shape[-2]:
        raise ShapeError(
            f"dense_affine: input features {x.shape} do not match weight {weight.shape}"
        )
    if x.ndim == 1:
        out = matmul(x.reshape(1, -1), weight).reshape(weight.shape[-1])
    elif weight.ndim > 2 and x.ndim == weight.ndim:
        # grouped: x (..., G, F), weight (G, F, O) -> (..., G, O)
        out = matmul(x.reshape(x.shape[:-1] + (1, x.shape[-1])), weight)
        out = out.reshape(out.shape[:-2] + (weight.shape[-1],))
    else:
        out = matmul(x, weight)
    if bias is not None:
        bias = as_tensor(bias)
        if bias.shape[-1] != weight.shape[-1]:
            raise ShapeError(f"dense_affine: bias {bias.shape} does not match weight {weight.shape}")
        out = out + bias
    return out


def relu(x: Tensor) -> Tensor:
    return _relu(x)


@dataclass
class BatchNormState:
    """Running statistics for one batch_norm call site.

    Variances are stored biased (population convention) so that freezing the
    running statistics at the batch statistics makes eval mode reproduce
    train mode exactly.
    """

    mean: np.ndarray
    var: np.ndarray
    momentum: float = 0.1

    @staticmethod
    def for_features(shape: tuple[int, ...] | int, momentum: float = 0.1) -> "BatchNormState":
        if isinstance(shape, int):
            shape = (shape,)
        return BatchNormState(
            mean=np.zeros(shape, dtype=DTYPE), var=np.ones(shape, dtype=DTYPE), momentum=momentum
        )


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    state: BatchNormState,
    training: bool,
    eps: float = 1e-5,
) -> Tensor:
    """Normalize over all axes except the last (feature) axis.

    Train mode uses batch statistics and updates ``state`` as a side effect;
    eval mode is a fixed affine map from the running statistics.
    """
    x = as_tensor(x)
    feat = x.shape[-1]
    if gamma.shape != (feat,) or beta.shape != (feat,):
        raise ShapeError(f"batch_norm: gamma/beta {gamma.shape}/{beta.shape} vs features {feat}")
    if state.mean.shape != (feat,):
        raise ShapeError(f"batch_norm: state {state.mean.shape} vs features {feat}")
    axes = tuple(range(x.ndim - 1))
    count = int(np.prod([x.shape[i] for i in axes])) if axes else 1
    if training:
        if count < 2:
            raise ShapeError(f"batch_norm: train mode needs >= 2 rows, got {count} for {x.shape}")
        mu = x.data.mean(axis=axes)
        var = np.mean(x.data * x.data, axis=axes) - mu * mu  # biased, one pass
        np.maximum(var, 0.0, out=var)
        m = state.momentum
        state.mean = (1 - m) * state.mean + m * mu
        state.var = (1 - m) * state.var + m * var
    else:
        mu, var = state.mean, state.var
    inv_sigma = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv_sigma
    out = gamma.data * xhat + beta.data

    def backward(g):
        dgamma = (g * xhat).sum(axis=axes)
        dbeta = g.sum(axis=axes)
        scale = gamma.data * inv_sigma
        if training:
            dx = scale * (g - dbeta / count - xhat * (dgamma / count))
        else:
            dx = g * scale
        return (dx, dgamma, dbeta)

    return Tensor._node(out, (x, as_tensor(gamma), as_tensor(beta)), backward)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    x = as_tensor(x)
    shift = np.max(x.data, axis=axis, keepdims=True)  # constant shift, gradient-exact
    e = (x - shift).exp()
    return e / e.sum(axis=axis, keepdims=True)


def scaled_dot_attention(q: Tensor, k: Tensor, v: Tensor, num_heads: int) -> Tensor:
    """Multi-head scaled dot-product attention over sets.

    Inputs are ``(batch, set, dim)``; ``dim`` is split across ``num_heads``
    and the per-head outputs are concatenated back.
    """
    q, k, v = as_tensor(q), as_tensor(k), as_tensor(v)
    if not (q.ndim == k.ndim == v.ndim == 3):
        raise ShapeError(f"scaled_dot_attention: need (B,S,D) inputs, got {q.shape}/{k.shape}/{v.shape}")
    b, s, d = q.shape
    if k.shape != (b, k.shape[1], d) or v.shape != k.shape:
        raise ShapeError(f"scaled_dot_attention: mismatched K/V {k.shape}/{v.shape} vs Q {q.shape}")
    if d % num_heads != 0:
        raise ShapeError(f"scaled_dot_attention: dim {d} not divisible by {num_heads} heads")
    dh = d // num_heads

    def split(t: Tensor) -> Tensor:
        return t.reshape(b, t.shape[1], num_heads, dh).transpose((0, 2, 1, 3))

    qh, kh, vh = split(q), split(k), split(v)  # (B, H, S, dh)
    scores = matmul(qh, kh.transpose((0, 1, 3, 2))) * (1.0 / math.sqrt(dh))
    attn = softmax(scores, axis=-1)
    out = matmul(attn, vh)  # (B, H, S, dh)
    return out.transpose((0, 2, 1, 3)).reshape(b, s, d)


@dataclass
class GRUCellParams:
    """Weights for one GRU cell, gate order (reset, update, candidate)."""

    w_ih: Parameter  # (in, 3*hidden)
    w_hh: Parameter  # (hidden, 3*hidden)
    b_ih: Parameter  # (3*hidden,)
    b_hh: Parameter  # (3*hidden,)

    @staticmethod
    def init(rng: np.random.Generator, input_dim: int, hidden: int, prefix: str) -> "GRUCellParams":
        return GRUCellParams(
            w_ih=Parameter(uniform_fan_in(rng, (input_dim, 3 * hidden), hidden), f"{prefix}.w_ih"),
            w_hh=Parameter(uniform_fan_in(rng, (hidden, 3 * hidden), hidden), f"{prefix}.w_hh"),
            b_ih=Parameter(uniform_fan_in(rng, (3 * hidden,), hidden), f"{prefix}.b_ih"),
            b_hh=Parameter(uniform_fan_in(rng, (3 * hidden,), hidden), f"{prefix}.b_hh"),
        )

    def parameters(self) -> list[Parameter]:
        return [self.w_ih, self.w_hh, self.b_ih, self.b_hh]


def gru_cell(x: Tensor, h: Tensor, p: GRUCellParams) -> Tensor:
    """Standard gated-recurrent-unit update for one timestep.

    ``x`` is ``(batch, in)``, ``h`` is ``(batch, hidden)``; returns the new
    hidden state.
    """
    x, h = as_tensor(x), as_tensor(h)
    hidden = h.shape[-1]
    if p.w_hh.shape != (hidden, 3 * hidden):
        raise ShapeError(f"gru_cell: hidden {h.shape} vs weights {p.w_hh.shape}")
    gi = dense_affine(x, p.w_ih, p.b_ih)
    gh = dense_affine(h, p.w_hh, p.b_hh)
    i_r, i_z, i_n = gi[..., :hidden], gi[..., hidden:2 * hidden], gi[..., 2 * hidden:]
    h_r, h_z, h_n = gh[..., :hidden], gh[..., hidden:2 * hidden], gh[..., 2 * hidden:]
    r = (i_r + h_r).sigmoid()
    z = (i_z + h_z).sigmoid()
    n = (i_n + r * h_n).tanh()
    return (1.0 - z) * n + z * h


def causal_conv1d(x: Tensor, weight: Tensor, bias: Tensor | None = None, dilation: int = 1) -> Tensor:
    """Causal 1D convolution.

    ``x`` is ``(batch, time, channels_in)``, ``weight`` is
    ``(kernel, channels_in, channels_out)``. Output step ``t`` sees only
    inputs at ``t, t-dilation, t-2*dilation, ...``; output length equals
    input length (left zero padding).
    """
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 3 or weight.ndim != 3:
        raise ShapeError(f"causal_conv1d: x {x.shape}, weight {weight.shape}")
    kernel, c_in, c_out = weight.shape
    if x.shape[-1] != c_in:
        raise ShapeError(f"causal_conv1d: channels {x.shape} vs weight {weight.shape}")
    b, t, _ = x.shape
    pad = (kernel - 1) * dilation
    if pad:
        x = concat([Tensor(np.zeros((b, pad, c_in), dtype=DTYPE)), x], axis=1)
    out = None
    for j in range(kernel):
        start = j * dilation
        piece = matmul(x[:, start:start + t, :], weight[j])
        out = piece if out is None else out + piece
    if bias is not None:
        out = out + as_tensor(bias)
    return out


def sum_over_set(x: Tensor, axis: int) -> Tensor:
    """Permutation-invariant aggregation: sum over one set axis."""
    return as_tensor(x).sum(axis=axis)


def huber_elementwise(pred: Tensor, target) -> Tensor:
    """Per-element Huber: 0.5*d^2 inside |d|<1, |d|-0.5 outside."""
    pred = as_tensor(pred)
    tgt = target.data if isinstance(target, Tensor) else np.asarray(target, dtype=DTYPE)
    if pred.shape != tgt.shape:
        raise ShapeError(f"huber_elementwise: {pred.shape} vs {tgt.shape}")
    d = pred.data - tgt
    small = np.abs(d) < 1.0
    data = np.where(small, 0.5 * d * d, np.abs(d) - 0.5)

    def backward(g):
        return (g * np.where(small, d, np.sign(d)),)

    return Tensor._node(data, (pred,), backward)


def mean_reduce(x: Tensor) -> Tensor:
    """Mean over all elements, producing a scalar."""
    return as_tensor(x).mean()


# ---------------------------------------------------------------------------
# MLP block used across the predictors
# ---------------------------------------------------------------------------


@dataclass
class MLP:
    """Affine stack with preactivation residual blocks.

    ``n_hidden`` affine layers of the same width: layer 1 maps the input in,
    then residual blocks span layers (2,3), (4,5), ...; a final affine maps
    to ``out_dim``. Between layers: ReLU then batch norm ("preactivation"
    inside the residual branches). ``n_hidden`` must be odd so blocks pair up.
    """

    weights: list[Parameter]
    biases: list[Parameter]
    gammas: list[Parameter]
    betas: list[Parameter]
    bn_states: list[BatchNormState] = field(default_factory=list)

    @staticmethod
    def init(rng: np.random.Generator, in_dim: int, width: int, out_dim: int,
             n_hidden: int, prefix: str) -> "MLP":
        if n_hidden < 1 or n_hidden % 2 == 0:
            raise ValueError(f"MLP: n_hidden must be odd and >= 1, got {n_hidden}")
        dims = [in_dim] + [width] * n_hidden + [out_dim]
        weights, biases = [], []
        for i in range(len(dims) - 1):
            weights.append(Parameter(uniform_fan_in(rng, (dims[i], dims[i + 1]), dims[i]),
                                     f"{prefix}.w{i}"))
            biases.append(Parameter(uniform_fan_in(rng, (dims[i + 1],), dims[i]), f"{prefix}.b{i}"))
        n_bn = n_hidden  # one ReLU+BN in front of each affine after the first, plus the output
        gammas = [Parameter(np.ones(width, dtype=DTYPE), f"{prefix}.g{i}") for i in range(n_bn)]
        betas = [Parameter(np.zeros(width, dtype=DTYPE), f"{prefix}.be{i}") for i in range(n_bn)]
        states = [BatchNormState.for_features(width) for _ in range(n_bn)]
        return MLP(weights, biases, gammas, betas, states)

    @property
    def n_hidden(self) -> int:
        return len(self.weights) - 1

    def __call__(self, x: Tensor, training: bool) -> Tensor:
        h = dense_affine(x, self.weights[0], self.biases[0])
        bn = 0

        def pre(t: Tensor) -> Tensor:
            nonlocal bn
            out = batch_norm(relu(t), self.gammas[bn], self.betas[bn], self.bn_states[bn], training)
            bn += 1
            return out

        layer = 1
        while layer + 1 < len(self.weights):  # residual block over two hidden affines
            branch = dense_affine(pre(h), self.weights[layer], self.biases[layer])
            branch = dense_affine(pre(branch), self.weights[layer + 1], self.biases[layer + 1])
            h = h + branch
            layer += 2
        return dense_affine(pre(h), self.weights[layer], self.biases[layer])

    def parameters(self) -> list[Parameter]:
        return [*self.weights, *self.biases, *self.gammas, *self.betas]

    def buffers(self) -> dict[str, np.ndarray]:
        out = {}
        for i, st in enumerate(self.bn_states):
            stem = self.gammas[i].name.rsplit(".", 1)[0]
            out[f"{stem}.bn{i}.mean"] = st.mean
            out[f"{stem}.bn{i}.var"] = st.var
        return out

    def load_buffers(self, bufs: dict[str, np.ndarray]) -> None:
        for i, st in enumerate(self.bn_states):
            stem = self.gammas[i].name.rsplit(".", 1)[0]
            st.mean = bufs[f"{stem}.bn{i}.mean"].copy()
            st.var = bufs[f"{stem}.bn{i}.var"].copy()

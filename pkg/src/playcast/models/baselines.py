"""Baseline predictors: linear extrapolation, MLP, GRUs, RED-style, causal CNN.

None of these are order-equivariant, so inputs must arrive in canonical
(team, role) order. The recurrent/convolutional models treat the scene as
one 46-dimensional signal per step (23 agents x 2 coords); RED-style works
on each trajectory independently and models no interactions.
"""

from __future__ import annotations

import numpy as np

from ..data.tracking import N_AGENTS, N_PER_TEAM
from ..diff import (
    MLP,
    GRUCellParams,
    Parameter,
    Tensor,
    causal_conv1d,
    dense_affine,
    gru_cell,
    relu,
    stack,
    uniform_fan_in,
    zeros,
)
from .scene import SceneBatch
from .spec import ConfigError, ModelSpec


def linear_extrapolate(past: np.ndarray, horizon: int) -> np.ndarray:
    """Constant velocity at the average past velocity, per coordinate.

    ``past`` is (..., n, 2); returns (..., horizon, 2).
    """
    past = np.asarray(past, dtype=np.float64)
    n = past.shape[-2]
    if n < 2:
        raise ConfigError(f"linear extrapolation needs >= 2 past steps, got {n}")
    v = (past[..., -1, :] - past[..., 0, :]) / (n - 1)
    t = np.arange(1.0, horizon + 1.0).reshape((horizon, 1))
    return past[..., -1:, :] + v[..., None, :] * t


class LinearExtrapolation:
    emits_dense = True

    def __init__(self, spec: ModelSpec, rng: np.random.Generator | None = None):
        self.spec = spec

    def forward(self, batch: SceneBatch, training: bool) -> Tensor:
        return Tensor(linear_extrapolate(batch.past, self.spec.horizon))

    def parameters(self):
        return []

    def buffers(self):
        return {}

    def load_buffers(self, bufs):
        pass


class MLPBaseline:
    """One flat MLP over every agent and step (2048 hidden by default)."""

    emits_dense = False

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        n = spec.input_len
        if spec.conditioned:
            in_dim = (1 + N_PER_TEAM) * spec.window_len * 2 + N_PER_TEAM * n * 2
        else:
            in_dim = N_AGENTS * n * 2
        out_dim = spec.n_out_agents * spec.n_controls * 2
        self.net = MLP.init(rng, in_dim, spec.hidden_width, out_dim, 5, "mlp")

    def forward(self, batch: SceneBatch, training: bool) -> Tensor:
        b = batch.batch_size
        if self.spec.conditioned:
            flat = np.concatenate([
                batch.cond_full.reshape(b, -1),
                batch.past[:, 1 + N_PER_TEAM:].reshape(b, -1),
            ], axis=1)
        else:
            flat = batch.past.reshape(b, -1)
        out = self.net(Tensor(flat), training)
        return out.reshape(b, self.spec.n_out_agents, self.spec.n_controls, 2)

    def parameters(self):
        return self.net.parameters()

    def buffers(self):
        return self.net.buffers()

    def load_buffers(self, bufs):
        self.net.load_buffers(bufs)


def _scene_steps(past: np.ndarray) -> np.ndarray:
    """(B, 23, n, 2) -> (B, n, 46), agent-major per step."""
    b, a, n, _ = past.shape
    return np.ascontiguousarray(past.transpose(0, 2, 1, 3)).reshape(b, n, a * 2)


class SimpleGRU:
    """2-layer GRU fed all agent positions per step, free-running future."""

    emits_dense = True

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        h = spec.embedding_width
        self.l1 = GRUCellParams.init(rng, N_AGENTS * 2, h, "gru1")
        self.l2 = GRUCellParams.init(rng, h, h, "gru2")
        self.w_out = Parameter(uniform_fan_in(rng, (h, N_AGENTS * 2), h), "out.w")
        self.b_out = Parameter(uniform_fan_in(rng, (N_AGENTS * 2,), h), "out.b")

    def forward(self, batch: SceneBatch, training: bool) -> Tensor:
        b = batch.batch_size
        h = self.spec.embedding_width
        steps = _scene_steps(batch.past)
        h1, h2 = zeros((b, h)), zeros((b, h))
        for t in range(steps.shape[1]):
            h1 = gru_cell(Tensor(steps[:, t]), h1, self.l1)
            h2 = gru_cell(h1, h2, self.l2)
        outs = []
        y = dense_affine(h2, self.w_out, self.b_out)
        outs.append(y)
        for _ in range(self.spec.horizon - 1):
            h1 = gru_cell(y, h1, self.l1)
            h2 = gru_cell(h1, h2, self.l2)
            y = dense_affine(h2, self.w_out, self.b_out)
            outs.append(y)
        seq = stack(outs, axis=1)  # (B, H, 46)
        return seq.reshape(b, self.spec.horizon, N_AGENTS, 2).transpose((0, 2, 1, 3))

    def parameters(self):
        return [*self.l1.parameters(), *self.l2.parameters(), self.w_out, self.b_out]

    def buffers(self):
        return {}

    def load_buffers(self, bufs):
        pass


class GRUEncDec:
    """Two distinct 2-layer GRUs; the decoder emits the control steps."""

    emits_dense = False

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        h = spec.embedding_width
        d = N_AGENTS * 2
        self.enc1 = GRUCellParams.init(rng, d, h, "enc1")
        self.enc2 = GRUCellParams.init(rng, h, h, "enc2")
        self.dec1 = GRUCellParams.init(rng, d, h, "dec1")
        self.dec2 = GRUCellParams.init(rng, h, h, "dec2")
        self.w_out = Parameter(uniform_fan_in(rng, (h, d), h), "out.w")
        self.b_out = Parameter(uniform_fan_in(rng, (d,), h), "out.b")

    def forward(self, batch: SceneBatch, training: bool) -> Tensor:
        b = batch.batch_size
        h = self.spec.embedding_width
        steps = _scene_steps(batch.past)
        h1, h2 = zeros((b, h)), zeros((b, h))
        for t in range(steps.shape[1]):
            h1 = gru_cell(Tensor(steps[:, t]), h1, self.enc1)
            h2 = gru_cell(h1, h2, self.enc2)
        x = Tensor(steps[:, -1])  # start decoding from the last observed scene
        outs = []
        for _ in range(self.spec.n_controls):
            h1 = gru_cell(x, h1, self.dec1)
            h2 = gru_cell(h1, h2, self.dec2)
            x = dense_affine(h2, self.w_out, self.b_out)
            outs.append(x)
        seq = stack(outs, axis=1)  # (B, K, 46)
        return seq.reshape(b, self.spec.n_controls, N_AGENTS, 2).transpose((0, 2, 1, 3))

    def parameters(self):
        return [*self.enc1.parameters(), *self.enc2.parameters(),
                *self.dec1.parameters(), *self.dec2.parameters(), self.w_out, self.b_out]

    def buffers(self):
        return {}

    def load_buffers(self, bufs):
        pass


class REDStyle:
    """Per-trajectory GRU encoder with a single affine decoder.

    Trajectories are processed independently with shared weights, so the
    prediction for one agent never depends on the others (or on batch
    composition: there is no batch norm on this path).
    """

    emits_dense = False

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        h = spec.embedding_width
        self.cell = GRUCellParams.init(rng, 2, h, "enc")
        self.w_out = Parameter(uniform_fan_in(rng, (h, spec.n_controls * 2), h), "out.w")
        self.b_out = Parameter(uniform_fan_in(rng, (spec.n_controls * 2,), h), "out.b")

    def forward(self, batch: SceneBatch, training: bool) -> Tensor:
        b = batch.batch_size
        n = self.spec.input_len
        seqs = batch.past.reshape(b * N_AGENTS, n, 2)
        h = zeros((b * N_AGENTS, self.spec.embedding_width))
        for t in range(n):
            h = gru_cell(Tensor(seqs[:, t]), h, self.cell)
        out = dense_affine(h, self.w_out, self.b_out)
        return out.reshape(b, N_AGENTS, self.spec.n_controls, 2)

    def parameters(self):
        return [*self.cell.parameters(), self.w_out, self.b_out]

    def buffers(self):
        return {}

    def load_buffers(self, bufs):
        pass


class AutoregCNN:
    """Dilated causal convolutions over the scene signal, free-running.

    The stack's output at step t is the predicted scene at t+1; generation
    appends each prediction and re-runs the stack. The raw output is
    always dense.
    """

    emits_dense = True

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        c, d = spec.embedding_width, N_AGENTS * 2
        self.dilations = (1, 2, 4)
        dims = [d] + [c] * len(self.dilations)
        self.convs = []
        for i, dil in enumerate(self.dilations):
            w = Parameter(uniform_fan_in(rng, (2, dims[i], dims[i + 1]), 2 * dims[i]),
                          f"conv{i}.w")
            bias = Parameter(uniform_fan_in(rng, (dims[i + 1],), 2 * dims[i]), f"conv{i}.b")
            self.convs.append((w, bias, dil))
        self.w_head = Parameter(uniform_fan_in(rng, (1, c, d), c), "head.w")
        self.b_head = Parameter(uniform_fan_in(rng, (d,), c), "head.b")

    def _stack(self, x: Tensor) -> Tensor:
        for w, bias, dil in self.convs:
            x = relu(causal_conv1d(x, w, bias, dilation=dil))
        return causal_conv1d(x, self.w_head, self.b_head)

    def forward(self, batch: SceneBatch, training: bool) -> Tensor:
        b = batch.batch_size
        steps = [Tensor(s) for s in _scene_steps(batch.past).transpose(1, 0, 2)]
        outs = []
        for _ in range(self.spec.horizon):
            seq = stack(steps, axis=1)
            y = self._stack(seq)[:, -1, :]
            steps.append(y)
            outs.append(y)
        seq = stack(outs, axis=1)
        return seq.reshape(b, self.spec.horizon, N_AGENTS, 2).transpose((0, 2, 1, 3))

    def parameters(self):
        out = []
        for w, bias, _ in self.convs:
            out += [w, bias]
        return out + [self.w_head, self.b_head]

    def buffers(self):
        return {}

    def load_buffers(self, bufs):
        pass

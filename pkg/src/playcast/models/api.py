"""Model construction, the shared forward+densify pipeline, checkpoints."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..diff import Tensor, load_checkpoint, save_checkpoint
from ..motion import Anchor, SparseTrack
from .baselines import (
    AutoregCNN,
    GRUEncDec,
    LinearExtrapolation,
    MLPBaseline,
    REDStyle,
    SimpleGRU,
)
from .densify import densify_controls
from .granma import GraNMA
from .scene import SceneBatch, SceneInput, ScenePrediction, batch_anchor_state, out_agent_slice
from .spec import ConfigError, ModelSpec

_BUILDERS = {
    "lin_ext": LinearExtrapolation,
    "mlp": MLPBaseline,
    "simple_gru": SimpleGRU,
    "gru_encdec": GRUEncDec,
    "red_style": REDStyle,
    "autoreg_cnn": AutoregCNN,
    "granma": GraNMA,
}


def build_model(spec: ModelSpec, seed: int = 0):
    rng = np.random.default_rng(seed)
    return _BUILDERS[spec.kind](spec, rng)


def named_parameters(model) -> dict:
    out = {}
    for p in model.parameters():
        if p.name in out:
            raise ConfigError(f"duplicate parameter name {p.name!r}")
        out[p.name] = p
    return out


def n_parameters(model) -> int:
    return sum(p.size for p in model.parameters())


def forward_with_controls(model, batch: SceneBatch, training: bool):
    """Run the model and densify; returns (dense, controls_or_None).

    Dense output is (B, A_out, horizon, 2). For sparse configurations the
    control tensor (B, A_out, K, 2) is returned too; gradients flow from
    the dense positions back through the interpolation into the controls.
    """
    spec = model.spec
    raw = model.forward(batch, training)
    offsets = spec.offsets
    if spec.emits_dense:
        if spec.output_stride == 1:
            return raw, None
        controls = raw[:, :, np.asarray(offsets) - 1, :]
    else:
        if spec.output_stride == 1:
            return raw, None
        controls = raw
    past_out = batch.past[:, out_agent_slice(spec)]
    anchor_pos, anchor_derivs = batch_anchor_state(past_out, spec.order)
    dense = densify_controls(controls, offsets, anchor_pos, anchor_derivs, spec.order)
    return dense, controls


def forward_densified(model, batch: SceneBatch, training: bool) -> Tensor:
    dense, _ = forward_with_controls(model, batch, training)
    return dense


def predict(scene: SceneInput, model) -> ScenePrediction:
    """Public inference: dense horizon-length output per predicted agent."""
    spec = model.spec
    batch = scene.to_batch(spec)
    dense_t, controls_t = forward_with_controls(model, batch, training=False)
    dense = dense_t.data[0]
    tracks = None
    if controls_t is not None:
        past_out = batch.past[:, out_agent_slice(spec)][0]
        offsets = spec.offsets
        tracks = []
        for a in range(dense.shape[0]):
            anchor = Anchor.from_history(past_out[a], spec.order)
            controls = tuple((off, controls_t.data[0, a, i].copy())
                             for i, off in enumerate(offsets))
            tracks.append(SparseTrack(anchor=anchor, controls=controls,
                                      stride=spec.output_stride))
    agent_indices = list(range(12, 23)) if spec.conditioned else list(range(23))
    return ScenePrediction(dense=dense, tracks=tracks, agent_indices=agent_indices)


# -- checkpoint integration -----------------------------------------------------


def save_model(path: str | Path, model, optimizer=None, meta: dict | None = None) -> None:
    meta = dict(meta or {})
    meta["model_spec"] = model.spec.to_dict()
    params = {name: p.data for name, p in named_parameters(model).items()}
    opt_state = optimizer.state_dict() if optimizer is not None else None
    save_checkpoint(path, params, model.buffers(), opt_state, meta)


def load_model(path: str | Path):
    """Rebuild a model from a checkpoint; returns (model, meta)."""
    blob = load_checkpoint(path)
    meta = blob["meta"]
    if "model_spec" not in meta:
        raise ConfigError(f"{path}: checkpoint carries no model spec")
    spec = ModelSpec.from_dict(meta["model_spec"])
    model = build_model(spec, seed=0)
    params = named_parameters(model)
    stored = blob["params"]
    missing = sorted(set(params) - set(stored))
    extra = sorted(set(stored) - set(params))
    if missing or extra:
        raise ConfigError(f"{path}: parameter mismatch (missing {missing[:3]}, extra {extra[:3]})")
    for name, p in params.items():
        arr = stored[name]
        if arr.shape != p.data.shape:
            raise ConfigError(f"{path}: shape mismatch for {name}: {arr.shape} vs {p.data.shape}")
        p.data = arr.copy()
    if blob["buffers"]:
        model.load_buffers(blob["buffers"])
    return model, meta

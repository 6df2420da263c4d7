"""The optimization loop: Adam, per-epoch lr decay, multi-seed runs.

Each seed trains independently: shuffled mini-batches, forward through the
model and the differentiable interpolation, Huber loss on the densified
outputs, backward, Adam step. The learning rate decays by the configured
factor at every epoch end; validation runs in batch-norm eval mode and the
best-validation parameters are kept. A seed that produces a non-finite
loss or gradient is aborted with diagnostics while the other seeds
continue.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..diff import Adam, GradientNaNError, config_hash, no_grad
from ..models.api import build_model, forward_densified, named_parameters, save_model
from ..models.scene import arrays_to_batch
from .config import DataBundle, SplitArrays, TrainConfig
from .loss import huber_loss


@dataclass
class EpochRow:
    epoch: int
    train_loss: float
    val_loss: float
    lr: float


@dataclass
class SeedResult:
    seed: int
    model: object | None
    rows: list[EpochRow]
    best_val: float
    best_epoch: int
    aborted: str | None = None
    checkpoint_path: Path | None = None


@dataclass
class TrainResult:
    config: TrainConfig
    seeds: dict[int, SeedResult]

    @property
    def models(self) -> dict[int, object]:
        return {s: r.model for s, r in self.seeds.items() if r.model is not None}


def _apply_flips(past, future, rng):
    signs = np.where(rng.random((past.shape[0], 1, 1, 2)) < 0.5, 1.0, -1.0)
    return past * signs, future * signs


def _clip_gradients(params, max_norm: float) -> None:
    total = 0.0
    for p in params:
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    norm = np.sqrt(total)
    if norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for p in params:
            if p.grad is not None:
                p.grad = p.grad * scale


def evaluate_loss(model, split: SplitArrays, batch_size: int) -> float:
    """Mean Huber loss over a split in eval mode."""
    total, count = 0.0, 0
    with no_grad():
        for start in range(0, split.n_windows, batch_size):
            past = split.past[start:start + batch_size]
            future = split.future[start:start + batch_size]
            batch, targets = arrays_to_batch(past, future, model.spec)
            dense = forward_densified(model, batch, training=False)
            loss = huber_loss(targets, dense).item()
            total += loss * past.shape[0]
            count += past.shape[0]
    return total / count


def train_one_seed(config: TrainConfig, data: DataBundle, seed: int,
                   log=None) -> SeedResult:
    model = build_model(config.model, seed=seed)
    params = list(named_parameters(model).values())
    opt = Adam(params, lr=config.learning_rate, lr_decay=config.lr_decay)
    rng = np.random.default_rng(seed + 0x5EED)
    rows: list[EpochRow] = []
    best_val, best_epoch = np.inf, -1
    best_params: dict[str, np.ndarray] = {}
    best_buffers: dict[str, np.ndarray] = {}

    train = data.train
    try:
        for epoch in range(config.epochs):
            order = rng.permutation(train.n_windows)
            losses = []
            for start in range(0, train.n_windows, config.batch_size):
                idx = order[start:start + config.batch_size]
                if idx.size < 2:
                    continue  # batch norm needs at least two rows
                past = train.past[idx]
                future = train.future[idx]
                if config.augment_flips:
                    past, future = _apply_flips(past, future, rng)
                batch, targets = arrays_to_batch(past, future, model.spec)
                dense = forward_densified(model, batch, training=True)
                loss = huber_loss(targets, dense)
                value = loss.item()
                if not np.isfinite(value):
                    raise GradientNaNError(
                        f"non-finite training loss {value} at epoch {epoch}")
                if params:  # linear extrapolation has nothing to optimize
                    opt.zero_grad()
                    loss.backward()
                    if config.grad_clip is not None:
                        _clip_gradients(params, config.grad_clip)
                    opt.step()
                losses.append(value)
            opt.decay_epoch()
            val_loss = evaluate_loss(model, data.val, config.batch_size)
            rows.append(EpochRow(epoch=epoch, train_loss=float(np.mean(losses)),
                                 val_loss=val_loss, lr=opt.lr))
            if log:
                log(seed, rows[-1])
            if val_loss < best_val:
                best_val, best_epoch = val_loss, epoch
                best_params = {p.name: p.data.copy() for p in params}
                best_buffers = {k: v.copy() for k, v in model.buffers().items()}
    except GradientNaNError as exc:
        return SeedResult(seed=seed, model=None, rows=rows, best_val=best_val,
                          best_epoch=best_epoch, aborted=str(exc))

    if best_params:  # restore best-validation weights
        named = named_parameters(model)
        for name, arr in best_params.items():
            named[name].data = arr
        model.load_buffers(best_buffers)
    return SeedResult(seed=seed, model=model, rows=rows, best_val=best_val,
                      best_epoch=best_epoch)


def train(config: TrainConfig, data: DataBundle, run_dir: str | Path | None = None,
          log=None) -> TrainResult:
    """Train one model per seed; optionally persist a run directory.

    Run directory layout: ``config.json``, per-seed
    ``metrics_seed<N>.csv`` (epoch,train_loss,val_loss,lr), per-seed
    ``checkpoints/seed<N>_best.ckpt`` and a ``summary.json``.
    """
    if data.train.n_windows == 0:
        raise ValueError("empty training split")
    results: dict[int, SeedResult] = {}
    out = Path(run_dir) if run_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "checkpoints").mkdir(exist_ok=True)
        (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2))

    t0 = time.time()
    for seed in config.seeds:
        result = train_one_seed(config, data, seed, log=log)
        results[seed] = result
        if out is not None:
            with open(out / f"metrics_seed{seed}.csv", "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(["epoch", "train_loss", "val_loss", "lr"])
                for r in result.rows:
                    writer.writerow([r.epoch, repr(r.train_loss), repr(r.val_loss), repr(r.lr)])
            if result.model is not None:
                path = out / "checkpoints" / f"seed{seed}_best.ckpt"
                save_model(path, result.model, meta={
                    "seed": seed,
                    "epoch": result.best_epoch,
                    "config_hash": config_hash(config.to_dict()),
                })
                result.checkpoint_path = path

    if out is not None:
        summary = {
            "elapsed_s": time.time() - t0,
            "seeds": {
                str(s): {"best_val": r.best_val, "best_epoch": r.best_epoch,
                         "aborted": r.aborted}
                for s, r in results.items()
            },
        }
        (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return TrainResult(config=config, seeds=results)

"""Optimization loop, loss, and dataset bundling for training runs."""

from .config import (
    STABLE_AUTOREG_LR,
    DataBundle,
    SplitArrays,
    TrainConfig,
    bundle_from_examples,
    bundle_from_manifest,
)
from .loss import huber_loss
from .loop import EpochRow, SeedResult, TrainResult, evaluate_loss, train, train_one_seed

__all__ = [
    "STABLE_AUTOREG_LR", "DataBundle", "SplitArrays", "TrainConfig",
    "bundle_from_examples", "bundle_from_manifest",
    "huber_loss",
    "EpochRow", "SeedResult", "TrainResult", "evaluate_loss", "train", "train_one_seed",
]

"""Tracking ingestion, windowing, augmentation and synthetic data."""

from .tracking import (
    AWAY_SLICE,
    BALL_INDEX,
    CSV_HEADER,
    HOME_SLICE,
    N_AGENTS,
    N_PER_TEAM,
    TrackedExample,
    TrackingFormatError,
    canonical_agents,
    load_stream,
    load_tracking,
    write_tracking,
)
from .windows import (
    PredictionWindow,
    augment_flip,
    in_play_spans,
    make_windows,
    windows_to_arrays,
)
from .synth import SynthParams, synth_play, synth_plays
from .manifest import SPLITS, assign_splits, read_manifest, split_for_index, write_manifest

__all__ = [
    "AWAY_SLICE", "BALL_INDEX", "CSV_HEADER", "HOME_SLICE", "N_AGENTS", "N_PER_TEAM",
    "TrackedExample", "TrackingFormatError", "canonical_agents", "load_stream",
    "load_tracking", "write_tracking",
    "PredictionWindow", "augment_flip", "in_play_spans", "make_windows", "windows_to_arrays",
    "SynthParams", "synth_play", "synth_plays",
    "SPLITS", "assign_splits", "read_manifest", "split_for_index", "write_manifest",
]

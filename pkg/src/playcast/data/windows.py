"""Prediction windows: in-play slicing, overlap control, flip augmentation."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .tracking import TrackedExample


@dataclass
class PredictionWindow:
    """A T-step window split into past (n) and future (T - n)."""

    positions: np.ndarray  # (23, T, 2), agent-first
    n_past: int
    match_id: str
    start_frame: int
    frame_rate_hz: float

    @property
    def past(self) -> np.ndarray:
        return self.positions[:, : self.n_past]

    @property
    def future(self) -> np.ndarray:
        return self.positions[:, self.n_past:]

    @property
    def horizon(self) -> int:
        return self.positions.shape[1] - self.n_past


def in_play_spans(in_play: np.ndarray) -> list[tuple[int, int]]:
    """Maximal contiguous [start, end) runs of in-play frames."""
    spans = []
    start = None
    for i, flag in enumerate(in_play):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(in_play)))
    return spans


def make_windows(example: TrackedExample, window_len: int = 50, n_past: int = 10) -> list[PredictionWindow]:
    """Windows with at most 50% overlap, never crossing out-of-play frames.

    Within each in-play span, windows start at offsets 0, ceil(T/2),
    2*ceil(T/2), ... from the span start while the whole window fits.
    """
    if not (window_len > n_past >= 2):
        raise ValueError(f"need window_len > n_past >= 2, got {window_len}/{n_past}")
    stride = math.ceil(window_len / 2)
    out = []
    for span_start, span_end in in_play_spans(example.in_play):
        start = span_start
        while start + window_len <= span_end:
            block = example.positions[start:start + window_len]  # (T, 23, 2)
            out.append(PredictionWindow(
                positions=np.ascontiguousarray(block.transpose(1, 0, 2)),
                n_past=n_past,
                match_id=example.match_id,
                start_frame=start,
                frame_rate_hz=example.frame_rate_hz,
            ))
            start += stride
    return out


def augment_flip(window: PredictionWindow, flip_x: bool, flip_y: bool) -> PredictionWindow:
    """Negate pitch-centered coordinates across past and future consistently."""
    if not (flip_x or flip_y):
        return window
    flipped = window.positions.copy()
    if flip_x:
        flipped[..., 0] = -flipped[..., 0]
    if flip_y:
        flipped[..., 1] = -flipped[..., 1]
    return replace(window, positions=flipped)


def windows_to_arrays(windows: list[PredictionWindow]) -> tuple[np.ndarray, np.ndarray]:
    """Stack windows into (W, 23, n, 2) past and (W, 23, T-n, 2) future."""
    if not windows:
        raise ValueError("no windows to stack")
    past = np.stack([w.past for w in windows])
    future = np.stack([w.future for w in windows])
    return past, future

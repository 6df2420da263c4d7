"""Closed-form interpolation between sparse trajectory control points.

A segment between a start state and a target position is filled in by
holding one derivative of position constant: velocity (order 1),
acceleration (order 2), jerk (order 3) or snap (order 4). The constant is
solved so the polynomial lands exactly on the target, e.g. for constant
acceleration ``a = 2 (sT - v0 T) / T^2`` with positions taken relative to
the segment start. Each coordinate is treated independently.

Chained segments carry the terminal derivatives of one polynomial into the
next, so the dense path is continuous in position and the first
``order - 1`` derivatives. Every dense position is an affine function of
the control positions, which is what lets training losses back-propagate
through the interpolation; the arithmetic below is written against a small
ops shim so the same code runs on plain numpy arrays and on autodiff
tensors.

Units: positions in meters, one step = one frame; derivatives are
per-step quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
import numpy as np

_FACT = (1.0, 1.0, 2.0, 6.0, 24.0)


class InvalidSegmentError(ValueError):
    pass


class MotionOrder(IntEnum):
    """Which derivative of position is held constant over a segment."""

    VELOCITY = 1
    ACCELERATION = 2
    JERK = 3
    SNAP = 4


def _check_order(order) -> int:
    try:
        return int(MotionOrder(int(order)))
    except ValueError:
        raise InvalidSegmentError(f"motion order must be 1..4, got {order!r}") from None


class _NumpyOps:
    """Array backend for the shared interpolation core."""

    @staticmethod
    def expand(x):
        return np.asarray(x, dtype=np.float64)[..., None]

    @staticmethod
    def concat_time(pieces):
        return np.concatenate(pieces, axis=-1)


def chain_control_segments(ops, pos0, derivs, targets, durations, order: int):
    """Interpolate through consecutive control points, time on the last axis.

    ``pos0``/``derivs`` describe the anchor state; ``targets[k]`` must be hit
    after ``durations[k]`` further steps. Segment k+1 starts from segment k's
    terminal position and derivatives. Works on any value type supporting
    arithmetic with numpy scalars (ndarray or autodiff Tensor); returns the
    backend's concatenation of per-segment position blocks plus the final
    state, ``(positions, pos, derivs)``.
    """
    order = _check_order(order)
    if len(targets) != len(durations):
        raise InvalidSegmentError("targets and durations must pair up")
    pos = pos0
    ds = list(derivs[: order - 1])
    if len(ds) < order - 1:
        raise InvalidSegmentError(
            f"order {order} needs {order - 1} anchor derivative(s), got {len(ds)}")
    pieces = []
    for sT, T in zip(targets, durations):
        T = int(T)
        if T < 1:
            raise InvalidSegmentError(f"segment duration must be >= 1, got {T}")
        # solve the constant order-th derivative so the segment ends on sT
        known = 0.0
        for k, d in enumerate(ds, start=1):
            known = known + d * (float(T) ** k / _FACT[k])
        c = (sT - pos - known) * (_FACT[order] / float(T) ** order)
        t = np.arange(1.0, T + 1.0)
        seg = ops.expand(pos) + ops.expand(c) * (t ** order / _FACT[order])
        for k, d in enumerate(ds, start=1):
            seg = seg + ops.expand(d) * (t ** k / _FACT[k])
        pieces.append(seg)
        # terminal derivatives seed the next segment (C^(order-1) continuity)
        coeffs = ds + [c]
        new_ds = []
        for m in range(1, order):
            dm = 0.0
            for k in range(m, order + 1):
                dm = dm + coeffs[k - 1] * (float(T) ** (k - m) / _FACT[k - m])
            new_ds.append(dm)
        ds = new_ds
        pos = sT
    return ops.concat_time(pieces), pos, tuple(ds)


# ---------------------------------------------------------------------------
# public numpy API
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterpSegment:
    """One interpolation span: start state, target position, duration, order.

    ``s0``/``sT`` may be scalars or arrays (one value per coordinate);
    ``v0``/``a0``/``j0`` are required once the order demands them.
    """

    s0: object
    sT: object
    duration: int
    order: int = MotionOrder.ACCELERATION
    v0: object = None
    a0: object = None
    j0: object = None

    def __post_init__(self):
        order = _check_order(self.order)
        if int(self.duration) < 1:
            raise InvalidSegmentError(f"duration must be >= 1, got {self.duration}")
        needed = ("v0", "a0", "j0")[: order - 1]
        for name in needed:
            if getattr(self, name) is None:
                raise InvalidSegmentError(f"order {order} requires {name}")

    def initial_derivatives(self) -> tuple:
        order = _check_order(self.order)
        return tuple(np.asarray(getattr(self, n), dtype=np.float64)
                     for n in ("v0", "a0", "j0")[: order - 1])


def solve_constant_term(seg: InterpSegment):
    """The constant order-th derivative that lands the segment on ``sT``."""
    order = _check_order(seg.order)
    T = float(seg.duration)
    rel = np.asarray(seg.sT, dtype=np.float64) - np.asarray(seg.s0, dtype=np.float64)
    known = np.zeros_like(rel)
    for k, d in enumerate(seg.initial_derivatives(), start=1):
        known = known + d * (T ** k / _FACT[k])
    return (rel - known) * (_FACT[order] / T ** order)


def interpolate_segment(seg: InterpSegment) -> np.ndarray:
    """Positions at steps 1..duration; time is the leading output axis."""
    positions, _, _ = chain_control_segments(
        _NumpyOps, np.asarray(seg.s0, dtype=np.float64), seg.initial_derivatives(),
        [np.asarray(seg.sT, dtype=np.float64)], [seg.duration], seg.order)
    return np.moveaxis(positions, -1, 0)


def segment_terminal_derivatives(seg: InterpSegment) -> tuple[np.ndarray, ...]:
    """Derivatives (up to order-1) of the segment polynomial at t = duration."""
    _, _, ds = chain_control_segments(
        _NumpyOps, np.asarray(seg.s0, dtype=np.float64), seg.initial_derivatives(),
        [np.asarray(seg.sT, dtype=np.float64)], [seg.duration], seg.order)
    return ds


def estimate_anchor_derivatives(history: np.ndarray, order: int) -> tuple[np.ndarray, ...]:
    """Backward finite differences of the trailing observed positions.

    ``history`` is time-first (last entry = most recent). Returns the
    ``order - 1`` per-step derivatives (v0, a0, j0 as needed); the m-th uses
    the m-th backward difference, so ``order`` points suffice.
    """
    order = _check_order(order)
    hist = np.asarray(history, dtype=np.float64)
    if hist.shape[0] < order:
        raise InvalidSegmentError(
            f"need at least {order} trailing positions for order {order}, got {hist.shape[0]}")
    out = []
    for m in range(1, order):
        d = np.zeros_like(hist[-1])
        for i in range(m + 1):
            d = d + ((-1.0) ** i) * math.comb(m, i) * hist[-1 - i]
        out.append(d)
    return tuple(out)


@dataclass(frozen=True)
class Anchor:
    """Last observed position plus its estimated per-step derivatives."""

    position: object
    derivatives: tuple = ()

    @staticmethod
    def from_history(history: np.ndarray, order: int) -> "Anchor":
        hist = np.asarray(history, dtype=np.float64)
        return Anchor(position=hist[-1],
                      derivatives=estimate_anchor_derivatives(hist, order))


@dataclass(frozen=True)
class SparseTrack:
    """Sparse control points over a prediction horizon.

    ``controls`` are (step offset, position) pairs with strictly increasing
    offsets counted from the first future step; the last offset is the
    horizon. ``stride`` records the nominal spacing.
    """

    anchor: Anchor
    controls: tuple = field(default=())
    stride: int = 1

    def __post_init__(self):
        if not self.controls:
            raise InvalidSegmentError("SparseTrack needs at least one control point")
        offs = [int(o) for o, _ in self.controls]
        if offs[0] < 1 or any(b <= a for a, b in zip(offs, offs[1:])):
            raise InvalidSegmentError(f"control offsets must be strictly increasing >= 1: {offs}")
        if int(self.stride) < 1:
            raise InvalidSegmentError(f"stride must be >= 1, got {self.stride}")

    @property
    def horizon(self) -> int:
        return int(self.controls[-1][0])

    def offsets(self) -> list[int]:
        return [int(o) for o, _ in self.controls]


def control_offsets(horizon: int, stride: int) -> list[int]:
    """Offsets stride, 2*stride, ... with the horizon always included."""
    if stride < 1 or horizon < 1:
        raise InvalidSegmentError(f"horizon/stride must be >= 1, got {horizon}/{stride}")
    offs = list(range(stride, horizon + 1, stride))
    if not offs or offs[-1] != horizon:
        offs.append(horizon)
    return offs


def sparsify_dense(dense: np.ndarray, stride: int, anchor: Anchor) -> SparseTrack:
    """Keep every stride-th dense output (time-first), plus the final one."""
    dense = np.asarray(dense, dtype=np.float64)
    horizon = dense.shape[0]
    offs = control_offsets(horizon, stride)
    controls = tuple((o, dense[o - 1]) for o in offs)
    return SparseTrack(anchor=anchor, controls=controls, stride=int(stride))


def densify(track: SparseTrack, order: int = MotionOrder.ACCELERATION) -> np.ndarray:
    """Dense positions for every step 1..horizon through all control points."""
    order = _check_order(order)
    offs = track.offsets()
    durations = [offs[0]] + [b - a for a, b in zip(offs, offs[1:])]
    targets = [np.asarray(p, dtype=np.float64) for _, p in track.controls]
    derivs = tuple(np.asarray(d, dtype=np.float64) for d in track.anchor.derivatives)
    if len(derivs) < order - 1:
        raise InvalidSegmentError(
            f"anchor carries {len(derivs)} derivative(s); order {order} needs {order - 1}")
    positions, _, _ = chain_control_segments(
        _NumpyOps, np.asarray(track.anchor.position, dtype=np.float64),
        derivs, targets, durations, order)
    return np.moveaxis(positions, -1, 0)

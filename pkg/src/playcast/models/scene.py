"""Scene containers and anchor bookkeeping for the predictors.

Canonical agent layout everywhere: index 0 is the ball, 1..11 the home
team (the attackers in the conditioned task), 12..22 the away team (the
defenders). Batches are plain numpy; models wrap them as constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.tracking import AWAY_SLICE, BALL_INDEX, HOME_SLICE, N_AGENTS, N_PER_TEAM
from ..motion import SparseTrack
from .spec import ConfigError, ModelSpec


@dataclass
class SceneBatch:
    """Model input: pasts for everyone, full trajectories when conditioned."""

    past: np.ndarray                 # (B, 23, n, 2)
    cond_full: np.ndarray | None = None  # (B, 12, n+H, 2): ball + attackers

    @property
    def batch_size(self) -> int:
        return self.past.shape[0]


@dataclass
class SceneInput:
    """One scene for the public predict API."""

    ball: np.ndarray        # (L, 2)
    attackers: np.ndarray   # (11, L, 2)
    defenders: np.ndarray   # (11, n, 2)

    def validate_for(self, spec: ModelSpec) -> None:
        ball = np.asarray(self.ball, dtype=np.float64)
        att = np.asarray(self.attackers, dtype=np.float64)
        dfd = np.asarray(self.defenders, dtype=np.float64)
        if att.shape[0] != N_PER_TEAM or dfd.shape[0] != N_PER_TEAM:
            raise ConfigError(
                f"need {N_PER_TEAM} attackers and defenders, got {att.shape[0]}/{dfd.shape[0]}")
        need = spec.window_len if spec.conditioned else spec.input_len
        if ball.shape != (need, 2) or att.shape != (N_PER_TEAM, need, 2):
            raise ConfigError(
                f"ball/attacker trajectories must have {need} steps for this model, "
                f"got {ball.shape} / {att.shape}")
        if dfd.shape != (N_PER_TEAM, spec.input_len, 2):
            raise ConfigError(
                f"defender pasts must be ({N_PER_TEAM}, {spec.input_len}, 2), got {dfd.shape}")
        for name, arr in (("ball", ball), ("attackers", att), ("defenders", dfd)):
            if not np.all(np.isfinite(arr)):
                raise ConfigError(f"non-finite coordinates in {name}")

    def to_batch(self, spec: ModelSpec) -> SceneBatch:
        self.validate_for(spec)
        n = spec.input_len
        ball = np.asarray(self.ball, dtype=np.float64)
        att = np.asarray(self.attackers, dtype=np.float64)
        dfd = np.asarray(self.defenders, dtype=np.float64)
        past = np.zeros((1, N_AGENTS, n, 2))
        past[0, BALL_INDEX] = ball[:n]
        past[0, HOME_SLICE] = att[:, :n]
        past[0, AWAY_SLICE] = dfd
        cond = None
        if spec.conditioned:
            cond = np.zeros((1, 1 + N_PER_TEAM, spec.window_len, 2))
            cond[0, 0] = ball
            cond[0, 1:] = att
        return SceneBatch(past=past, cond_full=cond)


@dataclass
class ScenePrediction:
    """Dense futures per predicted agent, plus sparse controls if any."""

    dense: np.ndarray                       # (A_out, horizon, 2)
    tracks: list[SparseTrack] | None        # one per agent for sparse heads
    agent_indices: list[int]                # canonical indices of predicted agents


def windows_to_batch(windows, spec: ModelSpec) -> tuple[SceneBatch, np.ndarray]:
    """Stack windows into a model batch plus the target futures."""
    past = np.stack([w.past for w in windows])
    future = np.stack([w.future for w in windows])
    if past.shape[2] != spec.input_len or future.shape[2] != spec.horizon:
        raise ConfigError(
            f"window length {past.shape[2]}+{future.shape[2]} does not match model "
            f"{spec.input_len}+{spec.horizon}")
    cond = None
    targets = future
    if spec.conditioned:
        full = np.concatenate([past, future], axis=2)
        cond = full[:, : 1 + N_PER_TEAM]
        targets = future[:, AWAY_SLICE]
    return SceneBatch(past=past, cond_full=cond), targets


def arrays_to_batch(past: np.ndarray, future: np.ndarray, spec: ModelSpec):
    """Same as windows_to_batch but from pre-stacked arrays."""
    cond = None
    targets = future
    if spec.conditioned:
        full = np.concatenate([past, future], axis=2)
        cond = full[:, : 1 + N_PER_TEAM]
        targets = future[:, AWAY_SLICE]
    return SceneBatch(past=past, cond_full=cond), targets


def batch_anchor_state(past: np.ndarray, order: int) -> tuple[np.ndarray, tuple]:
    """Anchor position and backward-difference derivatives, batched.

    ``past`` is (..., n, 2); derivatives are per-step, one per order below
    the motion order.
    """
    import math
    n = past.shape[-2]
    if n < order:
        raise ConfigError(f"past length {n} too short for order-{order} anchors")
    pos = past[..., -1, :]
    derivs = []
    for m in range(1, order):
        d = np.zeros_like(pos)
        for i in range(m + 1):
            d = d + ((-1.0) ** i) * math.comb(m, i) * past[..., n - 1 - i, :]
        derivs.append(d)
    return pos, tuple(derivs)


def out_agent_slice(spec: ModelSpec) -> slice:
    return AWAY_SLICE if spec.conditioned else slice(0, N_AGENTS)

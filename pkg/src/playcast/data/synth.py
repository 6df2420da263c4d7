"""Synthetic soccer-play generator.

Stand-in for proprietary tracking data: attackers chase randomly resampled
waypoints under speed/acceleration caps, the ball shadows its possessor and
flies to a new attacker on pass events, and each defender steers toward a
fixed convex combination of (nearest attacker, ball, home region). The
result is smooth, correlated, non-linear multi-agent motion from a
deterministic per-seed rule, so generated datasets double as oracles.

Caps are enforced in the integrator, so per-step velocity and acceleration
finite differences of the emitted positions respect them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tracking import N_AGENTS, N_PER_TEAM, TrackedExample, canonical_agents


@dataclass(frozen=True)
class SynthParams:
    pitch: tuple[float, float] = (105.0, 68.0)
    speed_cap: float = 9.0          # m/s
    accel_cap: float = 6.0          # m/s^2
    waypoint_rate: float = 0.03     # per-step probability of a new waypoint
    pass_rate: float = 0.02         # per-step probability of a pass
    frames: int = 100
    frame_rate_hz: float = 10.0
    cruise_speed: tuple[float, float] = (2.5, 6.5)  # per-player range, m/s


def _clip_mag(vec: np.ndarray, cap: float) -> np.ndarray:
    mag = np.linalg.norm(vec, axis=-1, keepdims=True)
    scale = np.minimum(1.0, cap / np.maximum(mag, 1e-12))
    return vec * scale


def _random_point(rng: np.random.Generator, pitch, margin=4.0) -> np.ndarray:
    half = np.array(pitch) / 2 - margin
    return rng.uniform(-half, half)


def synth_play(rng: np.random.Generator, match_id: str, params: SynthParams) -> TrackedExample:
    dt = 1.0 / params.frame_rate_hz
    half_w, half_h = params.pitch[0] / 2, params.pitch[1] / 2

    pos = np.zeros((N_AGENTS, 2))
    vel = np.zeros((N_AGENTS, 2))
    att = slice(1, 1 + N_PER_TEAM)
    dfd = slice(1 + N_PER_TEAM, N_AGENTS)

    pos[att] = [_random_point(rng, params.pitch) for _ in range(N_PER_TEAM)]
    # defenders start near grid-like home regions in their own (x > 0) half
    gx, gy = np.meshgrid(np.linspace(6, half_w - 8, 4), np.linspace(-half_h + 8, half_h - 8, 3))
    homes = np.stack([gx.ravel(), gy.ravel()], axis=1)[:N_PER_TEAM]
    pos[dfd] = homes + rng.normal(scale=2.0, size=(N_PER_TEAM, 2))

    possessor = int(rng.integers(0, N_PER_TEAM))
    receiver = possessor
    pos[0] = pos[att][possessor] + rng.normal(scale=0.3, size=2)

    cruise = rng.uniform(*params.cruise_speed, size=N_AGENTS)
    cruise[0] = min(params.speed_cap, params.cruise_speed[1] + 2.0)  # ball is quickest
    waypoints = np.array([_random_point(rng, params.pitch) for _ in range(N_PER_TEAM)])
    mix = rng.dirichlet(np.ones(3), size=N_PER_TEAM)  # (attacker, ball, home) weights

    frames = np.zeros((params.frames, N_AGENTS, 2))
    for t in range(params.frames):
        attackers = pos[att]
        # attackers: head for waypoints, resample on arrival or by chance
        switch = (rng.random(N_PER_TEAM) < params.waypoint_rate)
        arrived = np.linalg.norm(waypoints - attackers, axis=1) < 2.0
        for i in np.flatnonzero(switch | arrived):
            waypoints[i] = _random_point(rng, params.pitch)
        targets = np.zeros((N_AGENTS, 2))
        targets[att] = waypoints

        # ball: shadow the possessor until a pass sends it to a new attacker
        if receiver == possessor and rng.random() < params.pass_rate:
            choices = [i for i in range(N_PER_TEAM) if i != possessor]
            receiver = int(rng.choice(choices))
        if receiver != possessor and np.linalg.norm(pos[0] - attackers[receiver]) < 1.0:
            possessor = receiver
        targets[0] = attackers[receiver if receiver != possessor else possessor]

        # defenders: convex mix of nearest attacker, ball and home region
        d2 = ((pos[dfd][:, None, :] - attackers[None, :, :]) ** 2).sum(-1)
        nearest = attackers[np.argmin(d2, axis=1)]
        targets[dfd] = mix[:, :1] * nearest + mix[:, 1:2] * pos[0] + mix[:, 2:] * homes

        to_target = targets - pos
        dist = np.linalg.norm(to_target, axis=1, keepdims=True)
        desired_speed = np.minimum(cruise[:, None], dist / dt * 0.25)
        desired = to_target / np.maximum(dist, 1e-9) * desired_speed
        vel = _clip_mag(vel + _clip_mag(desired - vel, params.accel_cap * dt), params.speed_cap)
        pos = pos + vel * dt
        frames[t] = pos

    agents = canonical_agents()
    return TrackedExample(
        match_id=match_id,
        frame_rate_hz=params.frame_rate_hz,
        positions=frames,
        in_play=np.ones(params.frames, dtype=bool),
        teams=tuple(t for t, _ in agents),
        roles=tuple(r for _, r in agents),
    )


def synth_plays(seed: int, count: int, params: SynthParams | None = None) -> list[TrackedExample]:
    """Deterministic dataset: play k depends only on (seed, k)."""
    params = params or SynthParams()
    streams = np.random.SeedSequence(seed).spawn(count)
    return [synth_play(np.random.default_rng(s), f"synth_{seed}_{k:05d}", params)
            for k, s in enumerate(streams)]

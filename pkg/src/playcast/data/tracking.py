"""Tracking-data model and CSV ingestion.

One CSV file holds one match (or synthetic play): header
``frame,agent_id,team,role,x_m,y_m,in_play``, one row per agent per frame,
frames as contiguous integers. Exactly 23 agents per frame: one ``ball``
and 11 per side (``home``/``away``). Coordinates are pitch-centered
meters; ``in_play`` is 0/1 and must agree across the rows of a frame.

Agents are kept in canonical order everywhere: ball first, then home
players by role index, then away players by role index.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TEAMS = ("ball", "home", "away")
N_AGENTS = 23
N_PER_TEAM = 11

CSV_HEADER = ["frame", "agent_id", "team", "role", "x_m", "y_m", "in_play"]


class TrackingFormatError(ValueError):
    """Malformed tracking file; message carries file/line context."""


@dataclass
class TrackedExample:
    """One match worth of positions in canonical agent order."""

    match_id: str
    frame_rate_hz: float
    positions: np.ndarray  # (T, 23, 2) meters
    in_play: np.ndarray    # (T,) bool
    teams: tuple[str, ...]
    roles: tuple[int, ...]

    def __post_init__(self):
        t = self.positions.shape[0]
        if self.positions.shape != (t, N_AGENTS, 2):
            raise TrackingFormatError(
                f"{self.match_id}: positions must be (T, {N_AGENTS}, 2), got {self.positions.shape}")
        if self.in_play.shape != (t,):
            raise TrackingFormatError(f"{self.match_id}: in_play length mismatch")
        if not np.all(np.isfinite(self.positions)):
            raise TrackingFormatError(f"{self.match_id}: non-finite coordinates")

    @property
    def n_frames(self) -> int:
        return self.positions.shape[0]


def canonical_agents() -> list[tuple[str, int]]:
    out = [("ball", 0)]
    out += [("home", r) for r in range(N_PER_TEAM)]
    out += [("away", r) for r in range(N_PER_TEAM)]
    return out


BALL_INDEX = 0
HOME_SLICE = slice(1, 1 + N_PER_TEAM)
AWAY_SLICE = slice(1 + N_PER_TEAM, N_AGENTS)


def load_tracking(path: str | Path, frame_rate_hz: float = 10.0) -> TrackedExample:
    """Parse and validate one tracking CSV."""
    path = Path(path)
    slot = {agent: i for i, agent in enumerate(canonical_agents())}
    frames: dict[int, np.ndarray] = {}
    seen: dict[int, set[int]] = {}
    flags: dict[int, int] = {}

    def err(line_no: int, msg: str):
        raise TrackingFormatError(f"{path.name}:{line_no}: {msg}")

    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise TrackingFormatError(f"{path.name}:1: bad header {header!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                err(line_no, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
            try:
                frame = int(row[0])
                team, role = row[2], int(row[3])
                x, y = float(row[4]), float(row[5])
                in_play = int(row[6])
            except ValueError as e:
                err(line_no, f"unparseable row: {e}")
            if team not in TEAMS:
                err(line_no, f"unknown team {team!r}")
            if (team, role) not in slot:
                err(line_no, f"bad role {role} for team {team!r}")
            if not (np.isfinite(x) and np.isfinite(y)):
                err(line_no, f"non-finite coordinates in frame {frame}")
            if in_play not in (0, 1):
                err(line_no, f"in_play must be 0/1, got {row[6]!r}")
            idx = slot[(team, role)]
            arr = frames.setdefault(frame, np.full((N_AGENTS, 2), np.nan))
            got = seen.setdefault(frame, set())
            if idx in got:
                err(line_no, f"duplicate agent {team}/{role} in frame {frame}")
            got.add(idx)
            arr[idx] = (x, y)
            if frame in flags and flags[frame] != in_play:
                err(line_no, f"inconsistent in_play flag within frame {frame}")
            flags[frame] = in_play

    if not frames:
        raise TrackingFormatError(f"{path.name}: no frames")
    order = sorted(frames)
    if order != list(range(order[0], order[0] + len(order))):
        raise TrackingFormatError(f"{path.name}: frames are not contiguous integers")
    for frame in order:
        if len(seen[frame]) != N_AGENTS:
            missing = [a for a, i in slot.items() if i not in seen[frame]]
            raise TrackingFormatError(
                f"{path.name}: frame {frame} has {len(seen[frame])} agents; missing {missing}")
    positions = np.stack([frames[fr] for fr in order])
    in_play = np.array([bool(flags[fr]) for fr in order])
    agents = canonical_agents()
    return TrackedExample(
        match_id=path.stem,
        frame_rate_hz=frame_rate_hz,
        positions=positions,
        in_play=in_play,
        teams=tuple(t for t, _ in agents),
        roles=tuple(r for _, r in agents),
    )


def write_tracking(path: str | Path, example: TrackedExample) -> None:
    agents = canonical_agents()
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for t in range(example.n_frames):
            flag = int(example.in_play[t])
            for i, (team, role) in enumerate(agents):
                x, y = example.positions[t, i]
                writer.writerow([t, f"{team}{role}", team, role, repr(float(x)),
                                 repr(float(y)), flag])


def load_stream(paths: list[str | Path], frame_rate_hz: float = 10.0):
    """Yield validated examples from a list of CSV paths."""
    for p in paths:
        yield load_tracking(p, frame_rate_hz=frame_rate_hz)

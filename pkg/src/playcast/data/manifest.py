"""Dataset manifests and the match-level train/val/test split.

A manifest is a plain-text file with one ``<csv path><TAB><split>`` line
per match. Splits are assigned by match position in the sorted id list,
``index % 10``: 0-7 train, 8 val, 9 test (80/10/10). Splitting is always
by match, never by window, so no trajectory leaks across splits.
"""

from __future__ import annotations

from pathlib import Path

SPLITS = ("train", "val", "test")


def split_for_index(index: int) -> str:
    r = index % 10
    if r < 8:
        return "train"
    return "val" if r == 8 else "test"


def assign_splits(match_ids: list[str]) -> dict[str, str]:
    return {mid: split_for_index(i) for i, mid in enumerate(sorted(match_ids))}


def write_manifest(path: str | Path, entries: list[tuple[str, str]]) -> None:
    """``entries`` are (csv_path, split) pairs."""
    lines = []
    for csv_path, split in entries:
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r} for {csv_path}")
        lines.append(f"{csv_path}\t{split}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path: str | Path) -> list[tuple[Path, str]]:
    base = Path(path).parent
    out = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            csv_path, split = line.split("\t")
        except ValueError:
            raise ValueError(f"{path}:{line_no}: expected '<path>\\t<split>'") from None
        if split not in SPLITS:
            raise ValueError(f"{path}:{line_no}: unknown split {split!r}")
        p = Path(csv_path)
        out.append((p if p.is_absolute() else base / p, split))
    return out

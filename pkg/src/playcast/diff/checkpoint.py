"""Self-describing binary checkpoint container.

Layout: 8-byte magic, little-endian uint64 header length, UTF-8 JSON
header, then the concatenated little-endian float64 payloads. The header
maps array names to shape/offset and carries run metadata (seed, epoch,
config hash) plus optimizer state, so a checkpoint can be inspected and
reloaded without any other context.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Any

import numpy as np

MAGIC = b"PLYCAST1"


class CheckpointError(RuntimeError):
    pass


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _collect(arrays: dict[str, np.ndarray], entries: list, payloads: list, offset: int,
             section: str) -> int:
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        data = arr.tobytes()  # numpy float64 is little-endian on all supported targets
        entries.append({
            "section": section,
            "name": name,
            "shape": list(arr.shape),
            "dtype": "<f8",
            "offset": offset,
            "nbytes": len(data),
        })
        payloads.append(data)
        offset += len(data)
    return offset


def save_checkpoint(
    path: str | Path,
    params: dict[str, np.ndarray],
    buffers: dict[str, np.ndarray] | None = None,
    optimizer: dict[str, Any] | None = None,
    meta: dict[str, Any] | None = None,
) -> None:
    entries: list[dict] = []
    payloads: list[bytes] = []
    offset = _collect(params, entries, payloads, 0, "params")
    if buffers:
        offset = _collect(buffers, entries, payloads, offset, "buffers")
    opt_header: dict[str, Any] = {}
    if optimizer:
        opt_header = {k: v for k, v in optimizer.items() if k not in ("m", "v")}
        for moment in ("m", "v"):
            if moment in optimizer:
                offset = _collect(
                    optimizer[moment], entries, payloads, offset, f"opt_{moment}")
    header = {
        "format": 1,
        "meta": meta or {},
        "optimizer": opt_header,
        "arrays": entries,
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(blob)))
        f.write(blob)
        for p in payloads:
            f.write(p)


def load_checkpoint(path: str | Path) -> dict[str, Any]:
    """Returns {params, buffers, optimizer, meta}; optimizer m/v are nested dicts."""
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a playcast checkpoint (bad magic)")
    (hlen,) = struct.unpack("<Q", raw[8:16])
    header = json.loads(raw[16:16 + hlen].decode())
    if header.get("format") != 1:
        raise CheckpointError(f"{path}: unsupported checkpoint format {header.get('format')}")
    base = 16 + hlen
    sections: dict[str, dict[str, np.ndarray]] = {}
    for e in header["arrays"]:
        start = base + e["offset"]
        arr = np.frombuffer(raw, dtype=np.dtype(e["dtype"]), count=int(np.prod(e["shape"], dtype=int)) if e["shape"] else 1, offset=start)
        arr = arr.reshape(e["shape"]).copy()
        sections.setdefault(e["section"], {})[e["name"]] = arr
    optimizer = dict(header.get("optimizer", {}))
    if "opt_m" in sections:
        optimizer["m"] = sections["opt_m"]
    if "opt_v" in sections:
        optimizer["v"] = sections["opt_v"]
    return {
        "params": sections.get("params", {}),
        "buffers": sections.get("buffers", {}),
        "optimizer": optimizer,
        "meta": header.get("meta", {}),
    }

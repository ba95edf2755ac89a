"""Self-describing array container: one JSON header line, then raw
little-endian binary64 blocks in header order. Byte-stable for
identical content."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DataError


def write_container(path, header: dict, arrays: list[tuple[str, np.ndarray]]) -> None:
    meta = dict(header)
    meta["blocks"] = [{"name": name, "shape": list(a.shape)} for name, a in arrays]
    line = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(line + b"\n")
        for _, array in arrays:
            handle.write(np.ascontiguousarray(array, dtype="<f8").tobytes())


def read_container(path) -> tuple[dict, dict[str, np.ndarray]]:
    path = Path(path)
    with open(path, "rb") as handle:
        try:
            header = json.loads(handle.readline().decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            raise DataError(f"{path}: bad container header ({exc})") from None
        arrays: dict[str, np.ndarray] = {}
        for block in header.get("blocks", []):
            shape = tuple(block["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = handle.read(count * 8)
            if len(buf) != count * 8:
                raise DataError(f"{path}: truncated block {block['name']!r}")
            arrays[block["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
    return header, arrays

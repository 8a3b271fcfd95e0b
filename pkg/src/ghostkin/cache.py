"""Binary cache for assembled operators.

File layout (fixed): 8-byte magic b"GKCACHE1", uint64 little-endian header
length, UTF-8 JSON header, then the payload arrays as row-major float64 in
the order listed under header["arrays"] (name, shape).  Files are keyed by a
content hash of the producing inputs; the hash is the file stem.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

_MAGIC = b"GKCACHE1"


def cache_dir() -> Path:
    d = Path(os.environ.get("GHOSTKIN_CACHE_DIR", ".ghostkin_cache"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def content_hash(payload: dict) -> str:
    """Deterministic hash of a JSON-serializable description."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:32]


def save_arrays(key: str, meta: dict, arrays: dict[str, np.ndarray]) -> Path:
    header = {"meta": meta,
              "arrays": [[name, list(a.shape)] for name, a in arrays.items()]}
    raw = json.dumps(header, sort_keys=True).encode()
    path = cache_dir() / f"{key}.gkc"
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(len(raw).to_bytes(8, "little"))
        fh.write(raw)
        for _, a in arrays.items():
            fh.write(np.ascontiguousarray(a, dtype=np.float64).tobytes())
    os.replace(tmp, path)
    return path


def load_arrays(key: str) -> tuple[dict, dict[str, np.ndarray]] | None:
    path = cache_dir() / f"{key}.gkc"
    if not path.exists():
        return None
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise IOError(f"bad cache magic in {path}")
        n = int.from_bytes(fh.read(8), "little")
        header = json.loads(fh.read(n).decode())
        arrays = {}
        for name, shape in header["arrays"]:
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(8 * count)
            arrays[name] = np.frombuffer(buf, dtype=np.float64).reshape(shape).copy()
    return header["meta"], arrays

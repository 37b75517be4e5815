"""Reader/writer for the UTB1 tensor-blob interchange format.

This is an independent implementation of the on-disk schema shared with
the beamforming pipeline: 4-byte magic "UTB1", u8 dtype code (0 = f32,
1 = f64, 2 = c64), u8 ndim, ndim little-endian u32 dims, then the
row-major little-endian payload. The file format, not the producing
package, is the interface.
"""

import json
import math
import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"UTB1"
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8"), 2: np.dtype("<c8")}


class BlobFormatError(Exception):
    pass


def read_blob(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 6 or data[:4] != MAGIC:
        raise BlobFormatError(f"{path}: missing UTB1 magic")
    code, ndim = data[4], data[5]
    if code not in _DTYPES:
        raise BlobFormatError(f"{path}: unknown dtype code {code}")
    end = 6 + 4 * ndim
    if len(data) < end:
        raise BlobFormatError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{ndim}I", data, 6)
    dtype = _DTYPES[code]
    want = math.prod(dims) * dtype.itemsize
    if len(data) - end != want:
        raise BlobFormatError(
            f"{path}: payload {len(data) - end} bytes, expected {want}")
    return np.frombuffer(data[end:], dtype=dtype).reshape(dims).copy()


def write_blob(path, tensor: np.ndarray):
    tensor = np.ascontiguousarray(tensor)
    for code, dt in _DTYPES.items():
        if np.dtype(tensor.dtype).newbyteorder("<") == dt:
            break
    else:
        raise BlobFormatError(f"cannot encode dtype {tensor.dtype}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BB", code, tensor.ndim))
        fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
        fh.write(tensor.astype(dt).tobytes())


@dataclass(frozen=True)
class ManifestEntry:
    input_path: str
    target_path: str
    sigma: float
    seed: int
    K: int
    phantom: str
    scale: float


def load_manifest(path):
    """Parse a JSONL dataset manifest into ManifestEntry records."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                entries.append(ManifestEntry(**json.loads(line)))
    if not entries:
        raise ValueError(f"{path}: empty manifest")
    return entries

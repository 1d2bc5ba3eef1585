"""Binary field snapshots (format tag LPVV0001).

Layout: a 64-byte header followed by the physical-space samples.

    bytes  0..7   magic ``LPVV0001``
    bytes  8..15  grid size N, unsigned 64-bit little endian
    bytes 16..23  number of components (1 scalar, 2 vector)
    bytes 24..31  time t, IEEE-754 double, little endian
    bytes 32..39  viscosity nu, double
    bytes 40..47  seed, unsigned 64-bit
    bytes 48..63  reserved, zero

Data: per component, N*N row-major float64 little-endian samples.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"LPVV0001"
_HEADER = struct.Struct("<8sQQddQ16x")
assert _HEADER.size == 64


@dataclass(frozen=True)
class SnapshotMeta:
    N: int
    components: int
    t: float
    nu: float
    seed: int


def write_snapshot(path, phys, t: float, nu: float, seed: int) -> None:
    """Write real physical samples, shape (N, N) or (2, N, N)."""
    arr = np.asarray(phys, dtype="<f8")
    if arr.ndim == 2:
        components = 1
        n = arr.shape[0]
    elif arr.ndim == 3 and arr.shape[0] == 2:
        components = 2
        n = arr.shape[1]
    else:
        raise ValueError(f"expected (N, N) or (2, N, N) samples, got {arr.shape}")
    if arr.shape[-2:] != (n, n):
        raise ValueError(f"snapshot grid must be square, got {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, components, float(t), float(nu), int(seed)))
        fh.write(np.ascontiguousarray(arr).tobytes(order="C"))


def read_snapshot(path):
    """Read a snapshot back as (samples, SnapshotMeta)."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated snapshot header")
        magic, n, components, t, nu, seed = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        count = components * n * n
        data = np.frombuffer(fh.read(count * 8), dtype="<f8")
    if data.size != count:
        raise ValueError(f"{path}: truncated snapshot payload")
    shape = (n, n) if components == 1 else (components, n, n)
    return data.reshape(shape).astype(np.float64), SnapshotMeta(
        int(n), int(components), float(t), float(nu), int(seed)
    )

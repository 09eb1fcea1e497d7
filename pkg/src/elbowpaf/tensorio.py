"""Reader/writer for the ``PAFT`` little-endian float32 tensor format.

Layout::

    b"PAFT" | version u8 = 1 | dtype u8 = 1 (float32 LE)
    | channels u32 | height u32 | width u32
    | height * width * channels float32, row-major, channel-interleaved
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import ElbowPafError, ScalarGrid, VectorGrid

MAGIC = b"PAFT"
VERSION = 1
DTYPE_F32 = 1
_HEADER = struct.Struct("<4sBBIII")
HEADER_SIZE = _HEADER.size  # 18


class FormatError(ElbowPafError):
    """Malformed PAFT data. ``offset`` is the byte position of the problem."""

    def __init__(self, message, source=None, offset=None):
        self.source = source
        self.offset = offset
        where = f"{source}: " if source is not None else ""
        at = f" at byte offset {offset}" if offset is not None else ""
        super().__init__(f"{where}{message}{at}")


def encode(array: np.ndarray) -> bytes:
    """Serialize an ``(h, w)`` or ``(h, w, c)`` array."""
    arr = np.asarray(array)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"cannot encode array of shape {arr.shape}")
    h, w, c = arr.shape
    payload = np.ascontiguousarray(arr, dtype="<f4").tobytes()
    return _HEADER.pack(MAGIC, VERSION, DTYPE_F32, c, h, w) + payload


def decode(data: bytes, source=None) -> np.ndarray:
    """Parse PAFT bytes into a float64 array of shape ``(h, w, channels)``."""
    if len(data) < HEADER_SIZE:
        raise FormatError(f"truncated header: expected {HEADER_SIZE} bytes, got {len(data)}",
                          source, len(data))
    magic, version, dtype, c, h, w = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", source, 0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", source, 4)
    if dtype != DTYPE_F32:
        raise FormatError(f"unsupported dtype code {dtype}", source, 5)
    if c < 1 or h < 1 or w < 1:
        raise FormatError(f"empty tensor dimensions c={c} h={h} w={w}", source, 6)
    expected = h * w * c * 4
    got = len(data) - HEADER_SIZE
    if got != expected:
        kind = "truncated" if got < expected else "oversized"
        raise FormatError(f"{kind} payload: expected {expected} bytes, got {got}",
                          source, HEADER_SIZE + min(got, expected))
    arr = np.frombuffer(data, dtype="<f4", offset=HEADER_SIZE).reshape(h, w, c)
    return arr.astype(np.float64)


def write(path, grid: ScalarGrid | VectorGrid | np.ndarray) -> None:
    arr = grid.values if hasattr(grid, "values") else grid
    Path(path).write_bytes(encode(arr))


def read(path) -> np.ndarray:
    return decode(Path(path).read_bytes(), source=str(path))


def read_scalar(path) -> ScalarGrid:
    arr = read(path)
    if arr.shape[2] != 1:
        raise FormatError(f"expected 1 channel, found {arr.shape[2]}", str(path), 6)
    return ScalarGrid(arr[:, :, 0])


def read_vector(path) -> VectorGrid:
    arr = read(path)
    if arr.shape[2] != 2:
        raise FormatError(f"expected 2 channels, found {arr.shape[2]}", str(path), 6)
    return VectorGrid(arr)


def quantize(grid):
    """Round-trip a grid through float32, matching what a PAFT file stores."""
    return type(grid)(grid.values.astype(np.float32).astype(np.float64))


def split_channels(arr: np.ndarray, n_parts: int, n_limbs: int, source=None):
    """Split a multi-channel tensor into part maps then ``(x, y)`` limb field pairs."""
    if arr.shape[2] != n_parts + 2 * n_limbs:
        raise FormatError(
            f"expected {n_parts} + 2*{n_limbs} channels, found {arr.shape[2]}", source, 6)
    maps = [ScalarGrid(arr[:, :, g]) for g in range(n_parts)]
    fields = [VectorGrid(arr[:, :, n_parts + 2 * h:n_parts + 2 * h + 2]) for h in range(n_limbs)]
    return maps, fields

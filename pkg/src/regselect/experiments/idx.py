"""Reader for the IDX image format (the MNIST container)."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

IMAGE_MAGIC = 0x00000803
# Refuse absurd allocations long before numpy would try them.
MAX_PIXELS = 1 << 31


def load_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into a (count, rows, cols) float array in [0,1].

    Layout: big-endian magic 0x00000803, then uint32 dims (count, rows,
    cols), then row-major unsigned bytes; each pixel p maps to p/255.
    """
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise ValueError("truncated IDX file: header needs 16 bytes")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IMAGE_MAGIC:
        raise ValueError(f"bad magic 0x{magic:08x}: expected IDX image magic 0x{IMAGE_MAGIC:08x}")
    total = count * rows * cols
    if total > MAX_PIXELS:
        raise ValueError(f"dimension overflow: {count}x{rows}x{cols} pixels exceeds the supported size")
    if len(data) - 16 < total:
        raise ValueError(f"truncated IDX payload: expected {total} pixel bytes, found {len(data) - 16}")
    if len(data) - 16 > total:
        raise ValueError(f"trailing bytes after {total} pixel bytes of IDX payload")
    pixels = np.frombuffer(data, dtype=np.uint8, count=total, offset=16)
    return pixels.reshape(count, rows, cols).astype(float) / 255.0

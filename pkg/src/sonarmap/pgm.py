"""Minimal binary PGM (P5) reader/writer for 8-bit range images."""

from __future__ import annotations

import numpy as np


def write_pgm(path, pixels: np.ndarray) -> None:
    """Write a 2D uint8 array as binary PGM (P5), maxval 255.

    Row 0 of the array is the first image row (for range images: r_min).
    """
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ValueError("PGM output requires a 2D array")
    if pixels.dtype != np.uint8:
        if pixels.min() < 0 or pixels.max() > 255:
            raise ValueError("pixel values outside [0, 255]")
        pixels = pixels.astype(np.uint8)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (P5) file into a 2D uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()

    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments running to end of line.
    tokens = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise ValueError(f"{path}: truncated PGM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            pos = data.find(b"\n", pos)
            if pos < 0:
                raise ValueError(f"{path}: unterminated comment")
            pos += 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: raster size mismatch")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()

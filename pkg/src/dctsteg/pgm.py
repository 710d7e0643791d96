"""Binary PGM (P5) reading and writing, 8-bit grayscale only."""

import numpy as np

from .errors import FormatError


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comment lines between header tokens
    while pos < len(data):
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise FormatError("unexpected end of PGM header")
    return data[start:pos], pos


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM file into a (height, width) uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (P5) file")
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _read_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise FormatError(f"{path}: non-numeric PGM header field {token!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise FormatError(f"{path}: bad dimensions {width}x{height}")
    if not 0 < maxval < 256:
        raise FormatError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    pos += 1  # single whitespace byte after maxval
    expected = width * height
    raster = data[pos : pos + expected]
    if len(raster) < expected:
        raise FormatError(f"{path}: truncated raster ({len(raster)} of {expected} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, image: np.ndarray) -> None:
    """Write a (height, width) uint8 array as binary PGM."""
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("PGM writer expects a 2-D grayscale array")
    img = img.astype(np.uint8, copy=False)
    height, width = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode())
        fh.write(img.tobytes())

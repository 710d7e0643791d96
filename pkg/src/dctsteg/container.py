"""Lossless coefficient storage ("SDC1" containers) and the ordered
non-zero-AC coefficient stream that the embedders operate on.

Container byte layout (little-endian, documented in docs/format.md):

    offset  size  field
    0       4     magic "SDC1"
    4       4     u32 original width in pixels
    8       4     u32 original height in pixels
    12      4     u32 quality factor
    16      64    quantization table, 64 x u8, row-major
    80      4     u32 block count (must equal ceil(w/8) * ceil(h/8))
    84      ...   block_count * 64 x i16 coefficients, blocks in raster
                  order, each block in zigzag order (position 0 = DC)
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .dct import BLOCK, CoeffPlane
from .errors import FormatError

MAGIC = b"SDC1"
HEADER_SIZE = 84
_HEADER = struct.Struct("<4sIII64sI")

INT16_MIN = -(2**15)
INT16_MAX = 2**15 - 1

# xorshift64 degenerates on an all-zero state; remap seed 0 to this constant.
_SEED_FALLBACK = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _xorshift64(seed: int):
    state = seed & _MASK64
    if state == 0:
        state = _SEED_FALLBACK
    while True:
        state ^= (state << 13) & _MASK64
        state ^= state >> 7
        state ^= (state << 17) & _MASK64
        yield state


def keyed_order(count: int, key: int) -> np.ndarray:
    """Fisher-Yates permutation of range(count) driven by xorshift64(key)."""
    order = list(range(count))
    rng = _xorshift64(key)
    for i in range(count - 1, 0, -1):
        j = next(rng) % (i + 1)
        order[i], order[j] = order[j], order[i]
    return np.asarray(order, dtype=np.int64)


def write_container(plane: CoeffPlane, path) -> None:
    """Serialize a coefficient plane; coefficients must fit in 16 bits."""
    coeffs = plane.coeffs
    if coeffs.size and (coeffs.min() < INT16_MIN or coeffs.max() > INT16_MAX):
        raise ValueError("coefficient out of 16-bit storage range")
    quant_bytes = plane.quant.astype(np.uint8).tobytes()
    header = _HEADER.pack(MAGIC, plane.width, plane.height, plane.quality,
                          quant_bytes, plane.n_blocks)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(coeffs.astype("<i2").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write container {path}: {exc}") from exc


def read_container(path) -> CoeffPlane:
    """Parse a container file back into a plane (integers only, no pre-round
    values)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < HEADER_SIZE:
        raise FormatError(f"{path}: truncated header at offset {len(data)} "
                          f"(need {HEADER_SIZE} bytes)")
    magic, width, height, quality, quant_bytes, block_count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r} at offset 0")
    if width == 0 or height == 0:
        raise FormatError(f"{path}: zero image dimension at offset 4")
    if not 1 <= quality <= 100:
        raise FormatError(f"{path}: quality factor {quality} out of range at offset 12")
    quant = np.frombuffer(quant_bytes, dtype=np.uint8).reshape(BLOCK, BLOCK).astype(np.int32)
    if quant.min() < 1:
        raise FormatError(f"{path}: zero quantization divisor at offset 16")
    expected_blocks = ((width + BLOCK - 1) // BLOCK) * ((height + BLOCK - 1) // BLOCK)
    if block_count != expected_blocks:
        raise FormatError(f"{path}: block count {block_count} does not match "
                          f"{width}x{height} image at offset 80")
    body = data[HEADER_SIZE:]
    expected_bytes = block_count * 64 * 2
    if len(body) != expected_bytes:
        raise FormatError(f"{path}: coefficient data truncated at offset "
                          f"{HEADER_SIZE + len(body)} (expected {expected_bytes} bytes)")
    coeffs = np.frombuffer(body, dtype="<i2").astype(np.int32).reshape(block_count, 64)
    return CoeffPlane(width, height, quality, quant, coeffs)


@dataclass
class CoeffStream:
    """Ordered non-zero AC coefficients with back-references into a plane.

    Canonical order is raster block order then ascending zigzag position;
    a key permutes the underlying slot order deterministically. `real` and
    `errors` are present only for compress-time streams.
    """

    block_idx: np.ndarray             # (n,) int64
    position: np.ndarray              # (n,) int64, zigzag position 1..63
    values: np.ndarray                # (n,) int32
    real: np.ndarray | None = field(default=None, repr=False)
    errors: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def has_errors(self) -> bool:
        return self.real is not None and self.errors is not None

    def replace_values(self, values) -> "CoeffStream":
        """New stream with the same back-references and fresh values."""
        values = np.asarray(values, dtype=np.int32)
        if values.shape != self.values.shape:
            raise ValueError("replacement values must match stream length")
        return CoeffStream(self.block_idx, self.position, values, self.real, self.errors)


def extract_stream(plane: CoeffPlane, key: int | None = None) -> CoeffStream:
    """Collect every non-zero AC coefficient of the plane.

    Without a key the canonical order is used. With a key, all AC slot
    positions (zero or not) are permuted by `keyed_order` first and the
    non-zero entries are taken in that order; because the permutation is over
    slots, cover and stego planes of equal geometry enumerate surviving
    entries consistently.
    """
    ac = plane.coeffs[:, 1:].reshape(-1)  # slot id = block * 63 + (position - 1)
    if key is None:
        slots = np.flatnonzero(ac)
    else:
        order = keyed_order(ac.size, key)
        slots = order[ac[order] != 0]
    block_idx = slots // 63
    position = slots % 63 + 1
    values = plane.coeffs[block_idx, position].astype(np.int32)
    real = errors = None
    if plane.real is not None:
        real = plane.real[block_idx, position].copy()
        errors = values - real
    return CoeffStream(block_idx, position, values, real, errors)


def write_back(stream: CoeffStream, plane: CoeffPlane) -> CoeffPlane:
    """Produce a new plane with the stream's current values written through.

    Entries zeroed by embedding are written as zeros; untouched positions are
    copied unchanged.
    """
    if len(stream):
        if stream.block_idx.max() >= plane.n_blocks or stream.block_idx.min() < 0:
            raise IndexError("stream entry references a block outside the plane")
        if stream.position.min() < 1 or stream.position.max() > 63:
            raise IndexError("stream entry references a non-AC position")
    out = plane.copy()
    out.coeffs[stream.block_idx, stream.position] = stream.values
    return out

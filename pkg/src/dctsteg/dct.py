"""8x8 block DCT pipeline: transform, quantization, rounding, and the
coefficient plane that carries pre-round values and rounding errors."""

from dataclasses import dataclass, field

import numpy as np

BLOCK = 8

# Raster index of each coefficient in zigzag scan order; position 0 is DC.
ZIGZAG_ORDER = np.array([
     0,  1,  8, 16,  9,  2,  3, 10,
    17, 24, 32, 25, 18, 11,  4,  5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13,  6,  7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
], dtype=np.int64)

# Inverse map: raster index -> zigzag position.
RASTER_TO_ZIGZAG = np.argsort(ZIGZAG_ORDER)

# Standard baseline luminance quantization table (the usual Annex-K constants).
BASE_LUMA_QUANT = np.array([
    [16, 11, 10, 16,  24,  40,  51,  61],
    [12, 12, 14, 19,  26,  58,  60,  55],
    [14, 13, 16, 24,  40,  57,  69,  56],
    [14, 17, 22, 29,  51,  87,  80,  62],
    [18, 22, 37, 56,  68, 109, 103,  77],
    [24, 35, 55, 64,  81, 104, 113,  92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103,  99],
], dtype=np.int32)


def _dct_matrix() -> np.ndarray:
    n = np.arange(BLOCK)
    k = n.reshape(-1, 1)
    mat = np.cos((2 * n + 1) * k * np.pi / (2 * BLOCK))
    mat[0, :] *= np.sqrt(1.0 / BLOCK)
    mat[1:, :] *= np.sqrt(2.0 / BLOCK)
    return mat


# Orthonormal DCT-II basis; forward is M @ x @ M.T, inverse is M.T @ X @ M.
_DCT_MAT = _dct_matrix()


def forward_block_dct(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT of one 8x8 pixel block, level-shifted by -128."""
    shifted = np.asarray(block, dtype=np.float64) - 128.0
    return _DCT_MAT @ shifted @ _DCT_MAT.T


def inverse_block_dct(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of forward_block_dct; returns real pixel values (unclamped)."""
    spatial = _DCT_MAT.T @ np.asarray(coeffs, dtype=np.float64) @ _DCT_MAT
    return spatial + 128.0


def scale_quant_table(base: np.ndarray, quality: int) -> np.ndarray:
    """Scale a base quantization table to a quality factor in [1, 100].

    Quality 50 returns the base table unchanged; higher quality shrinks the
    divisors, lower quality grows them. Entries stay clamped to [1, 255].
    """
    if not 1 <= quality <= 100:
        raise ValueError(f"quality factor must be in [1, 100], got {quality}")
    base = np.asarray(base, dtype=np.float64)
    if base.shape != (BLOCK, BLOCK) or base.min() < 1 or base.max() > 255:
        raise ValueError("base quantization table must be 8x8 with entries in [1, 255]")
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    scaled = np.floor((base * scale + 50.0) / 100.0)
    return np.clip(scaled, 1, 255).astype(np.int32)


def quantize(coeffs: np.ndarray, quant: np.ndarray) -> np.ndarray:
    """Elementwise division of DCT outputs by the quantization table."""
    return np.asarray(coeffs, dtype=np.float64) / np.asarray(quant, dtype=np.float64)


def round_half_away(values: np.ndarray) -> np.ndarray:
    # nearest integer with ties away from zero; np.round would take ties to even
    values = np.asarray(values, dtype=np.float64)
    return np.copysign(np.floor(np.abs(values) + 0.5), values)


def round_coeffs(real: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Round quantized coefficients to integers.

    Returns (rounded, errors) where errors = rounded - pre-round value, so
    every error lies in [-0.5, 0.5].
    """
    real = np.asarray(real, dtype=np.float64)
    rounded = round_half_away(real)
    return rounded.astype(np.int32), rounded - real


@dataclass
class CoeffPlane:
    """Quantized-coefficient representation of one grayscale image.

    Blocks are stored in raster order, each as 64 values in zigzag order
    (position 0 = DC). `real` holds the pre-rounding quantized values and is
    only present for planes produced by `compress`; planes loaded from disk
    carry integers alone.
    """

    width: int
    height: int
    quality: int
    quant: np.ndarray                 # (8, 8) int32 divisors
    coeffs: np.ndarray                # (n_blocks, 64) int32, zigzag order
    real: np.ndarray | None = field(default=None, repr=False)

    @property
    def blocks_x(self) -> int:
        return (self.width + BLOCK - 1) // BLOCK

    @property
    def blocks_y(self) -> int:
        return (self.height + BLOCK - 1) // BLOCK

    @property
    def n_blocks(self) -> int:
        return self.blocks_x * self.blocks_y

    @property
    def errors(self) -> np.ndarray | None:
        """Rounding errors (rounded - pre-round), or None for loaded planes."""
        if self.real is None:
            return None
        return self.coeffs - self.real

    def copy(self) -> "CoeffPlane":
        return CoeffPlane(
            self.width, self.height, self.quality, self.quant.copy(),
            self.coeffs.copy(), None if self.real is None else self.real.copy(),
        )


def pad_to_blocks(image: np.ndarray) -> np.ndarray:
    """Edge-replicate an image so both dimensions are multiples of 8."""
    h, w = image.shape
    pad_h = (-h) % BLOCK
    pad_w = (-w) % BLOCK
    if pad_h == 0 and pad_w == 0:
        return image
    return np.pad(image, ((0, pad_h), (0, pad_w)), mode="edge")


def compress(image: np.ndarray, quality: int, base_table: np.ndarray | None = None) -> CoeffPlane:
    """Transform an 8-bit grayscale image into a quantized coefficient plane.

    Keeps the pre-rounding values alongside the integers so downstream
    embedding can use the rounding errors.
    """
    image = np.asarray(image)
    if image.ndim != 2 or image.size == 0:
        raise ValueError("expected a non-empty 2-D grayscale image")
    height, width = image.shape
    quant = scale_quant_table(BASE_LUMA_QUANT if base_table is None else base_table, quality)

    padded = pad_to_blocks(image).astype(np.float64) - 128.0
    by, bx = padded.shape[0] // BLOCK, padded.shape[1] // BLOCK
    # (by, bx, 8, 8) view of all blocks, then batched orthonormal transform
    blocks = padded.reshape(by, BLOCK, bx, BLOCK).transpose(0, 2, 1, 3)
    freq = np.einsum("ij,byjk,lk->byil", _DCT_MAT, blocks, _DCT_MAT, optimize=True)
    real = freq / quant.astype(np.float64)

    real_zz = real.reshape(by * bx, 64)[:, ZIGZAG_ORDER]
    rounded, _ = round_coeffs(real_zz)
    return CoeffPlane(width, height, quality, quant, rounded, real_zz)


def decompress(plane: CoeffPlane) -> np.ndarray:
    """Rebuild the pixel image from a coefficient plane.

    Dequantizes, applies the inverse transform, undoes the level shift and
    clamps to [0, 255]; the result is cropped to the original dimensions.
    """
    by, bx = plane.blocks_y, plane.blocks_x
    raster = plane.coeffs[:, RASTER_TO_ZIGZAG].reshape(by, bx, BLOCK, BLOCK)
    deq = raster.astype(np.float64) * plane.quant.astype(np.float64)
    spatial = np.einsum("ji,byjk,kl->byil", _DCT_MAT, deq, _DCT_MAT, optimize=True)
    pixels = spatial.transpose(0, 2, 1, 3).reshape(by * BLOCK, bx * BLOCK) + 128.0
    clamped = np.clip(round_half_away(pixels), 0, 255).astype(np.uint8)
    return clamped[: plane.height, : plane.width]

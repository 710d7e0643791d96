"""Hamming-code primitives for matrix embedding.

A group of u = 2^v - 1 non-zero coefficients carries v message bits. The
parity-check matrix has the binary expansion of j (most significant bit in
row 0) as its j-th column, so locating the coefficient to change reduces to
an XOR of column indices.
"""

import numpy as np

MAX_GROUP_BITS = 8  # caps group size at 255 coefficients


def group_size(bits: int) -> int:
    """Coefficients per group for a given number of message bits."""
    if not 1 <= bits <= MAX_GROUP_BITS:
        raise ValueError(f"bits per group must be in [1, {MAX_GROUP_BITS}], got {bits}")
    return (1 << bits) - 1


def hamming_matrix(bits: int) -> np.ndarray:
    """The bits x (2^bits - 1) binary matrix whose column j encodes j."""
    u = group_size(bits)
    cols = np.arange(1, u + 1)
    shifts = np.arange(bits - 1, -1, -1)
    return ((cols[np.newaxis, :] >> shifts[:, np.newaxis]) & 1).astype(np.uint8)


def syndrome(matrix: np.ndarray, coeffs) -> np.ndarray:
    """Product of the parity-check matrix with a coefficient group, mod 2.

    Coefficient values are used directly; only their parities matter, and
    negative sums reduce to the non-negative residue (so -7 -> 1).
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    if coeffs.shape != (matrix.shape[1],):
        raise ValueError(f"expected {matrix.shape[1]} coefficients, got {coeffs.shape}")
    return ((matrix.astype(np.int64) @ coeffs) % 2).astype(np.uint8)


def locate_change(synd, message_bits) -> int:
    """Index (1-based) of the coefficient whose parity must flip, or 0.

    The bitwise difference between the wanted bits and the group syndrome,
    read most-significant-bit first, is the column index to modify; zero
    means the group already carries the wanted bits.
    """
    synd = np.asarray(synd, dtype=np.int64)
    message_bits = np.asarray(message_bits, dtype=np.int64)
    if synd.shape != message_bits.shape:
        raise ValueError("syndrome and message bit lengths differ")
    delta = (message_bits - synd) % 2
    pos = 0
    for bit in delta:
        pos = (pos << 1) | int(bit)
    return pos


def decode_group(matrix: np.ndarray, coeffs) -> np.ndarray:
    """Message bits carried by a group; identical to its syndrome."""
    return syndrome(matrix, coeffs)


def int_syndrome(values) -> int:
    """Group syndrome as an integer: XOR of 1-based indices of odd entries.

    Equivalent to `syndrome` with the matrix columns read as binary numbers;
    this is the fast path used by the embedders.
    """
    acc = 0
    for i, v in enumerate(values, start=1):
        if v & 1:
            acc ^= i
    return acc

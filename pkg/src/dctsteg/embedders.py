"""The three coefficient-domain embedding methods.

* f5: classic matrix embedding; the located coefficient steps toward zero,
  and a coefficient that reaches zero is dropped (shrinkage) with the same
  bits re-embedded over the re-filled group.
* mme: identical group logic, but the located coefficient steps in the
  direction chosen by its rounding error, never reaching zero.
* mde: one parity bit per run of consecutive stream entries; when the run's
  parity disagrees with the bit, the entry whose error-aware step stays
  closest to its pre-round value is the one changed.

Every method first embeds a 32-bit big-endian payload-length header with a
fixed parameter (one bit per group for f5/mme, 8-entry runs for mde) so the
extractor can recover the payload size before decoding.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .container import CoeffStream
from .errors import CapacityError, CorruptStegoError
from .matrix_coding import group_size

HEADER_BITS = 32
MDE_HEADER_RUN = 8
MDE_HEADER_COEFFS = HEADER_BITS * MDE_HEADER_RUN

METHODS = ("f5", "mme", "mde")


@dataclass
class EmbedReport:
    """Bookkeeping of one embedding run.

    `mod_errors` holds |pre-round - new value| per modification and
    `prior_errors` the matching |rounding error| of the entry before the
    change; both are None when the stream carries no pre-round values
    (containers store integers only). `positions` are stream indices.
    """

    method: str
    modifications: int = 0
    shrinkages: int = 0
    consumed: int = 0
    positions: list[int] = field(default_factory=list)
    mod_errors: list[float] | None = None
    prior_errors: list[float] | None = None


def adjust_coefficient(value: int, rounding_error: float) -> int:
    """Shift a non-zero coefficient by one unit without producing zero.

    A non-positive rounding error (rounded minus pre-round) means the integer
    sits at or below its pre-round value, so the step goes up, except that -1
    jumps to -2 to avoid zero; a positive error steps down, except that +1
    jumps to +2.
    """
    if value == 0:
        raise ValueError("cannot adjust a zero coefficient")
    if rounding_error <= 0:
        return -2 if value == -1 else value + 1
    return 2 if value == 1 else value - 1


def bits_from_int(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def int_from_bits(bits) -> int:
    acc = 0
    for b in bits:
        acc = (acc << 1) | (int(b) & 1)
    return acc


def bytes_to_bits(data: bytes) -> list[int]:
    """Unpack bytes into bits, most significant bit first."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8)).tolist()


def bits_to_bytes(bits) -> bytes:
    """Pack bits into bytes (MSB first); a final partial byte is zero-padded."""
    arr = np.asarray(bits, dtype=np.uint8)
    return np.packbits(arr).tobytes()


def random_bits(count: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=count).tolist()


def _length_header(payload_len: int) -> list[int]:
    if payload_len >= 1 << HEADER_BITS:
        raise ValueError("payload too long for the 32-bit length header")
    return bits_from_int(payload_len, HEADER_BITS)


def _new_report(method: str, stream: CoeffStream) -> EmbedReport:
    rep = EmbedReport(method)
    if stream.has_errors:
        rep.mod_errors = []
        rep.prior_errors = []
    return rep


def _record(rep: EmbedReport, idx: int, old: int, new: int, real) -> None:
    rep.modifications += 1
    rep.positions.append(idx)
    if rep.mod_errors is not None:
        rep.mod_errors.append(abs(real[idx] - new))
        rep.prior_errors.append(abs(old - real[idx]))


def _collect_group(values, cursor: int, size: int) -> list[int]:
    """Indices of the next `size` live (non-zero) entries at or after cursor."""
    group = []
    j = cursor
    n = len(values)
    while j < n and len(group) < size:
        if values[j] != 0:
            group.append(j)
        j += 1
    return group


def _embed_matrix_pass(values, errors, real, bits, per_group: int,
                       error_rule: bool, cursor: int, rep: EmbedReport) -> int:
    """Embed `bits` in groups of 2^per_group - 1 live entries; returns the
    cursor past the last consumed entry."""
    u = group_size(per_group)
    n = len(values)
    for base in range(0, len(bits), per_group):
        chunk = bits[base : base + per_group]
        target = int_from_bits(chunk) << (per_group - len(chunk))
        while True:
            group = _collect_group(values, cursor, u)
            if len(group) < u:
                raise CapacityError(cursor + u, n,
                                    "stream exhausted during embedding; "
                                    "shrinkage losses included")
            synd = 0
            for i, idx in enumerate(group, start=1):
                if values[idx] & 1:
                    synd ^= i
            change = synd ^ target
            if change == 0:
                cursor = group[-1] + 1
                break
            idx = group[change - 1]
            old = values[idx]
            if error_rule:
                new = adjust_coefficient(old, errors[idx])
            else:
                new = old - 1 if old > 0 else old + 1  # step toward zero
            values[idx] = new
            _record(rep, idx, old, new, real)
            if new == 0:
                rep.shrinkages += 1
                continue  # re-form the group over the survivors
            cursor = group[-1] + 1
            break
    return cursor


def _decode_matrix_pass(values, count: int, per_group: int,
                        cursor: int) -> tuple[list[int], int]:
    u = group_size(per_group)
    out: list[int] = []
    groups = -(-count // u if False else count // -1)  # placeholder, replaced below
    groups = math.ceil(count / per_group) if count else 0
    for _ in range(groups):
        group = _collect_group(values, cursor, u)
        if len(group) < u:
            raise CorruptStegoError(
                f"stream exhausted while decoding {count} bits")
        synd = 0
        for i, idx in enumerate(group, start=1):
            if values[idx] & 1:
                synd ^= i
        out.extend(bits_from_int(synd, per_group))
        cursor = group[-1] + 1
    return out[:count], cursor


def _matrix_embed(method: str, stream: CoeffStream, payload,
                  per_group: int, error_rule: bool) -> tuple[CoeffStream, EmbedReport]:
    payload = [int(b) & 1 for b in payload]
    u = group_size(per_group)
    n = len(stream)
    minimum = HEADER_BITS + math.ceil(len(payload) / per_group) * u
    if minimum > n:
        raise CapacityError(minimum, n)
    if error_rule and not stream.has_errors:
        raise ValueError(f"{method} embedding needs rounding errors; "
                         "embed at compress time, not from a container")
    values = stream.values.tolist()
    errors = stream.errors.tolist() if stream.errors is not None else None
    real = stream.real.tolist() if stream.real is not None else None
    rep = _new_report(method, stream)
    cursor = _embed_matrix_pass(values, errors, real, _length_header(len(payload)),
                                1, error_rule, 0, rep)
    cursor = _embed_matrix_pass(values, errors, real, payload,
                                per_group, error_rule, cursor, rep)
    rep.consumed = cursor
    return stream.replace_values(values), rep


def f5_embed(stream: CoeffStream, payload, bits_per_group: int = 1):
    """Matrix embedding with step-toward-zero modification and shrinkage."""
    return _matrix_embed("f5", stream, payload, bits_per_group, error_rule=False)


def mme_embed(stream: CoeffStream, payload, bits_per_group: int = 1):
    """Matrix embedding with the error-aware step; never shrinks the stream."""
    return _matrix_embed("mme", stream, payload, bits_per_group, error_rule=True)


def _matrix_extract(stream: CoeffStream, bits_per_group: int) -> list[int]:
    values = stream.values.tolist()
    header, cursor = _decode_matrix_pass(values, HEADER_BITS, 1, 0)
    length = int_from_bits(header)
    payload, _ = _decode_matrix_pass(values, length, bits_per_group, cursor)
    return payload


def f5_extract(stream: CoeffStream, bits_per_group: int = 1) -> list[int]:
    """Recover the payload embedded by f5_embed with the same parameters."""
    return _matrix_extract(stream, bits_per_group)


def mme_extract(stream: CoeffStream, bits_per_group: int = 1) -> list[int]:
    """Recover the payload embedded by mme_embed with the same parameters."""
    return _matrix_extract(stream, bits_per_group)


@dataclass
class RunPartition:
    """Division of a coefficient stream segment into equal consecutive runs,
    one per payload bit; trailing entries that do not fill a run are unused."""

    bit_count: int
    stream_length: int
    run_length: int

    @property
    def leftover(self) -> int:
        return self.stream_length - self.bit_count * self.run_length

    def bounds(self, i: int) -> tuple[int, int]:
        lo = i * self.run_length
        return lo, lo + self.run_length


def mde_partition(stream_length: int, bit_count: int) -> RunPartition:
    """Run length is stream_length // bit_count; zero runs mean no capacity."""
    if bit_count < 1:
        raise ValueError("bit count must be at least 1")
    run = stream_length // bit_count
    if run == 0:
        raise CapacityError(bit_count, stream_length,
                            "fewer coefficients than payload bits")
    return RunPartition(bit_count, stream_length, run)


def _embed_parity_run(values, errors, real, lo: int, hi: int, bit: int,
                      rep: EmbedReport) -> None:
    parity = sum(values[lo:hi]) % 2
    if parity == bit:
        return
    best_idx = -1
    best_new = 0
    best_err = math.inf
    for idx in range(lo, hi):
        cand = adjust_coefficient(values[idx], errors[idx])
        err = abs(real[idx] - cand)
        if err < best_err:  # strict: ties keep the lowest index
            best_idx, best_new, best_err = idx, cand, err
    old = values[best_idx]
    values[best_idx] = best_new
    _record(rep, best_idx, old, best_new, real)


def mde_embed(stream: CoeffStream, payload) -> tuple[CoeffStream, EmbedReport]:
    """Embed one bit per run as the parity of the run's coefficient sum.

    The header occupies the first 256 entries in fixed runs of 8; the payload
    runs partition the rest. Modifications use the error-aware step, so the
    stream length is preserved exactly.
    """
    if not stream.has_errors:
        raise ValueError("mde embedding needs rounding errors; "
                         "embed at compress time, not from a container")
    payload = [int(b) & 1 for b in payload]
    n = len(stream)
    minimum = MDE_HEADER_COEFFS + len(payload)
    if minimum > n:
        raise CapacityError(minimum, n)
    values = stream.values.tolist()
    errors = stream.errors.tolist()
    real = stream.real.tolist()
    rep = _new_report("mde", stream)
    for k, bit in enumerate(_length_header(len(payload))):
        lo = k * MDE_HEADER_RUN
        _embed_parity_run(values, errors, real, lo, lo + MDE_HEADER_RUN, bit, rep)
    rep.consumed = MDE_HEADER_COEFFS
    if payload:
        part = mde_partition(n - MDE_HEADER_COEFFS, len(payload))
        for i, bit in enumerate(payload):
            lo, hi = part.bounds(i)
            _embed_parity_run(values, errors, real,
                              MDE_HEADER_COEFFS + lo, MDE_HEADER_COEFFS + hi, bit, rep)
        rep.consumed += part.bit_count * part.run_length
    return stream.replace_values(values), rep


def mde_extract(stream: CoeffStream) -> list[int]:
    """Recover a payload embedded by mde_embed: run-sum parities."""
    values = stream.values.tolist()
    n = len(values)
    if n < MDE_HEADER_COEFFS:
        raise CorruptStegoError(f"stream of {n} entries cannot hold the header")
    header = [sum(values[k * MDE_HEADER_RUN : (k + 1) * MDE_HEADER_RUN]) % 2
              for k in range(HEADER_BITS)]
    length = int_from_bits(header)
    if length == 0:
        return []
    remaining = n - MDE_HEADER_COEFFS
    if length > remaining:
        raise CorruptStegoError(
            f"header says {length} bits but only {remaining} entries remain")
    part = mde_partition(remaining, length)
    bits = []
    for i in range(length):
        lo, hi = part.bounds(i)
        bits.append(sum(values[MDE_HEADER_COEFFS + lo : MDE_HEADER_COEFFS + hi]) % 2)
    return bits


def embed(method: str, stream: CoeffStream, payload,
          bits_per_group: int = 1) -> tuple[CoeffStream, EmbedReport]:
    """Dispatch to one of the three methods by name."""
    if method == "f5":
        return f5_embed(stream, payload, bits_per_group)
    if method == "mme":
        return mme_embed(stream, payload, bits_per_group)
    if method == "mde":
        return mde_embed(stream, payload)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def extract(method: str, stream: CoeffStream, bits_per_group: int = 1) -> list[int]:
    """Dispatch extraction to one of the three methods by name."""
    if method == "f5":
        return f5_extract(stream, bits_per_group)
    if method == "mme":
        return mme_extract(stream, bits_per_group)
    if method == "mde":
        return mde_extract(stream)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")

"""
Compact on-disk format for sparse ternary projection matrices.

Layout, little-endian:
    "STPM" | version u32 | n u32 | m u32 | k u32
    then m columns of k records (row_index u32, sign u8: 0x00 = -1, 0x01 = +1)

File size is 20 + 5 * m * k bytes.
"""
import logging
import struct
from pathlib import Path

import numpy as np

from ternsense.numerics import SparseTernaryMatrix
from .errors import ByteReader, FormatError

logger = logging.getLogger(__name__)

STP_MAGIC = b"STPM"
STP_VERSION = 1
STP_HEADER = "<4sIIII"
STP_RECORD = np.dtype([("row", "<u4"), ("sign", "u1")])


def stp_size(m: int, k: int) -> int:
    return struct.calcsize(STP_HEADER) + m * k * STP_RECORD.itemsize


def encode_stp(matrix: SparseTernaryMatrix) -> bytes:
    records = np.empty(matrix.m * matrix.k, dtype=STP_RECORD)
    records["row"] = matrix.indices.ravel()
    records["sign"] = matrix.signs.ravel() > 0
    header = struct.pack(STP_HEADER, STP_MAGIC, STP_VERSION, matrix.n, matrix.m, matrix.k)
    return header + records.tobytes()


def decode_stp(data: bytes, source: str = "<bytes>") -> SparseTernaryMatrix:
    """
    Parse and validate an STP buffer.

    Raises:
        FormatError: bad magic, truncated file, unsupported version, trailing
            data, index out of range, duplicate or unordered index, bad sign byte
    """
    reader = ByteReader(data, source)
    reader.expect_magic(STP_MAGIC)
    version, n, m, k = reader.unpack("<IIII")
    if version != STP_VERSION:
        raise FormatError(source, f"unsupported version {version}")
    if m < 1 or not 1 <= k <= n:
        raise FormatError(source, f"invalid dimensions n={n} m={m} k={k}")

    expected = m * k * STP_RECORD.itemsize
    if reader.remaining() < expected:
        raise FormatError(source, "truncated file")
    if reader.remaining() > expected:
        raise FormatError(source, "trailing data")

    records = np.frombuffer(reader.take(expected), dtype=STP_RECORD).reshape(m, k)
    rows = records["row"].astype(np.int64)
    signs = records["sign"]

    if rows.max() >= n:
        raise FormatError(source, f"row index {int(rows.max())} >= n")
    if k > 1:
        bad_columns = np.flatnonzero(np.any(np.diff(rows, axis=1) <= 0, axis=1))
        if bad_columns.size:
            raise FormatError(source, f"duplicate or unordered index in column {int(bad_columns[0])}")
    if np.any(signs > 1):
        raise FormatError(source, "bad sign byte")

    return SparseTernaryMatrix(n=n, m=m, k=k, indices=rows, signs=np.where(signs == 1, 1, -1))


def save_stp(matrix: SparseTernaryMatrix, path):
    path = Path(path)
    path.write_bytes(encode_stp(matrix))
    logger.info(f"Wrote {matrix.n}x{matrix.m} ternary matrix (k={matrix.k}) to {path}")


def load_stp(path) -> SparseTernaryMatrix:
    path = Path(path)
    return decode_stp(path.read_bytes(), source=str(path))

"""
Measurement file written by the sensing side and read by the reconstruction side.

Layout, little-endian:
    "TCSY" | version u32 | width u32 | height u32 | patch_side u32 | stride u32 | m u32 | count u32
    then count vectors of m float64 values, in patch origin order
"""
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ByteReader, FormatError

logger = logging.getLogger(__name__)

MEASUREMENT_MAGIC = b"TCSY"
MEASUREMENT_VERSION = 1
MEASUREMENT_HEADER = "<IIIIIII"


@dataclass
class MeasurementFile:
    """Per-patch measurement vectors of one image."""
    width: int
    height: int
    patch_side: int
    stride: int
    vectors: np.ndarray

    @property
    def m(self) -> int:
        return self.vectors.shape[1]

    @property
    def count(self) -> int:
        return self.vectors.shape[0]


def encode_measurements(measurements: MeasurementFile) -> bytes:
    header = struct.pack("<4s", MEASUREMENT_MAGIC) + struct.pack(
        MEASUREMENT_HEADER,
        MEASUREMENT_VERSION,
        measurements.width,
        measurements.height,
        measurements.patch_side,
        measurements.stride,
        measurements.m,
        measurements.count,
    )
    return header + np.asarray(measurements.vectors, dtype="<f8").tobytes(order="C")


def decode_measurements(data: bytes, source: str = "<bytes>") -> MeasurementFile:
    reader = ByteReader(data, source)
    reader.expect_magic(MEASUREMENT_MAGIC)
    version, width, height, patch_side, stride, m, count = reader.unpack(MEASUREMENT_HEADER)
    if version != MEASUREMENT_VERSION:
        raise FormatError(source, f"unsupported version {version}")

    values = np.frombuffer(reader.take(count * m * 8), dtype="<f8").astype(np.float64)
    if reader.remaining():
        raise FormatError(source, "trailing data")

    return MeasurementFile(
        width=width, height=height, patch_side=patch_side, stride=stride,
        vectors=values.reshape(count, m),
    )


def save_measurements(measurements: MeasurementFile, path):
    path = Path(path)
    path.write_bytes(encode_measurements(measurements))
    logger.info(f"Wrote {measurements.count} measurement vectors of length {measurements.m} to {path}")


def load_measurements(path) -> MeasurementFile:
    path = Path(path)
    return decode_measurements(path.read_bytes(), source=str(path))

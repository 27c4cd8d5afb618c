"""Binary artifact formats: ternary matrices, checkpoints and measurements."""
from .errors import FormatError
from .stp import decode_stp, encode_stp, load_stp, save_stp, stp_size
from .checkpoint import (
    checkpoint_tensors,
    decode_checkpoint,
    encode_checkpoint,
    encode_checkpoint_parts,
    load_checkpoint,
    save_checkpoint,
)
from .measurements import (
    MeasurementFile,
    decode_measurements,
    encode_measurements,
    load_measurements,
    save_measurements,
)

__all__ = [
    "FormatError",
    "decode_stp",
    "encode_stp",
    "load_stp",
    "save_stp",
    "stp_size",
    "checkpoint_tensors",
    "decode_checkpoint",
    "encode_checkpoint",
    "encode_checkpoint_parts",
    "load_checkpoint",
    "save_checkpoint",
    "MeasurementFile",
    "decode_measurements",
    "encode_measurements",
    "load_measurements",
    "save_measurements",
]

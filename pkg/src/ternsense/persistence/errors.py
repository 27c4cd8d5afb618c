"""Errors raised while reading or writing binary artifacts."""

import struct
from typing import Tuple


class FormatError(ValueError):
    """Malformed artifact file; reason is a short fixed phrase such as 'truncated file'."""
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class ByteReader:
    """Cursor over a byte buffer that turns short reads into FormatError('truncated file')."""

    def __init__(self, data: bytes, source: str):
        self.data = data
        self.source = source
        self.offset = 0

    def take(self, size: int) -> bytes:
        if size < 0 or self.offset + size > len(self.data):
            raise FormatError(self.source, "truncated file")
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def expect_magic(self, magic: bytes):
        head = self.data[:len(magic)]
        if len(head) == len(magic) and head != magic:
            raise FormatError(self.source, "bad magic")
        self.take(len(magic))

    def remaining(self) -> int:
        return len(self.data) - self.offset

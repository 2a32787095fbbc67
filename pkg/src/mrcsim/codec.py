"""Byte encodings for values carried in pairs and messages."""

from __future__ import annotations

from typing import List, Sequence, Tuple


def int_width(max_value: int) -> int:
    """Bytes needed for a fixed-width unsigned integer up to ``max_value``."""
    return max(1, (max_value.bit_length() + 7) // 8)


def encode_ints(values: Sequence[int], width: int) -> bytes:
    return b"".join(v.to_bytes(width, "big") for v in values)


def decode_ints(data: bytes, width: int) -> List[int]:
    if len(data) % width:
        raise ValueError("table length is not a multiple of the entry width")
    return [int.from_bytes(data[i : i + width], "big") for i in range(0, len(data), width)]


def pack(*fields: bytes) -> bytes:
    """Concatenate fields as netstrings (``len:bytes,``)."""
    return b"".join(b"%d:%s," % (len(f), f) for f in fields)


def unpack(data: bytes) -> Tuple[bytes, ...]:
    fields = []
    pos = 0
    while pos < len(data):
        colon = data.index(b":", pos)
        size = int(data[pos:colon])
        start = colon + 1
        end = start + size
        if data[end : end + 1] != b",":
            raise ValueError("malformed netstring")
        fields.append(data[start:end])
        pos = end + 1
    return tuple(fields)


def indexed(i: int, symbol: bytes) -> bytes:
    return b"%d:%s" % (i, symbol)


def split_indexed(value: bytes) -> Tuple[int, bytes]:
    head, _, rest = value.partition(b":")
    return int(head), rest

"""Byte layouts for frames and persisted cycles (all integers big-endian).

Frame (28 + payload_len bytes)::

    magic 0xB1 | k u8 | slot u64 | index u64 | key u64 | payload_len u16 | payload

Cycle file::

    b"RBOC" | k u8 | 2^k sorted keys as u64
"""

from __future__ import annotations

import struct

from .bitrev import MAX_K, reverse_bits
from .schedule import BroadcastCycle, Frame

FRAME_MAGIC = 0xB1
CYCLE_MAGIC = b"RBOC"

_HEADER = struct.Struct(">BBQQQH")
HEADER_SIZE = _HEADER.size  # 28
MAX_PAYLOAD = 0xFFFF


class WireError(ValueError):
    pass


class BadMagicError(WireError):
    pass


class TruncatedError(WireError):
    pass


class TrailingDataError(WireError):
    pass


class BitWidthError(WireError):
    pass


class SlotRangeError(WireError):
    pass


class IndexMismatchError(WireError):
    pass


class UnsortedCycleError(WireError):
    pass


def encode_frame(frame: Frame) -> bytes:
    if len(frame.payload) > MAX_PAYLOAD:
        raise WireError(f"payload of {len(frame.payload)} bytes exceeds {MAX_PAYLOAD}")
    header = _HEADER.pack(FRAME_MAGIC, frame.k, frame.slot, frame.index, frame.key, len(frame.payload))
    return header + bytes(frame.payload)


def _check_k(k: int) -> None:
    if k > MAX_K:
        raise BitWidthError(f"k={k} exceeds {MAX_K}")


def decode_frame(data: bytes) -> Frame:
    """Parse one frame occupying all of ``data``."""
    if len(data) >= 1 and data[0] != FRAME_MAGIC:
        raise BadMagicError(f"frame magic 0x{data[0]:02X} != 0x{FRAME_MAGIC:02X}")
    if len(data) < HEADER_SIZE:
        raise TruncatedError(f"frame header needs {HEADER_SIZE} bytes, got {len(data)}")
    _, k, slot, index, key, plen = _HEADER.unpack_from(data)
    _check_k(k)
    if slot >= 1 << k:
        raise SlotRangeError(f"slot {slot} outside a 2^{k} cycle")
    if index != reverse_bits(slot, k):
        raise IndexMismatchError(f"index {index} != rev_{k}({slot})")
    end = HEADER_SIZE + plen
    if len(data) < end:
        raise TruncatedError(f"payload needs {plen} bytes, got {len(data) - HEADER_SIZE}")
    if len(data) > end:
        raise TrailingDataError(f"{len(data) - end} bytes after the frame")
    return Frame(k, slot, index, key, bytes(data[HEADER_SIZE:end]))


def encode_cycle(cycle: BroadcastCycle) -> bytes:
    return CYCLE_MAGIC + bytes([cycle.k]) + struct.pack(f">{cycle.n}Q", *cycle.sorted_keys)


def decode_cycle(data: bytes) -> BroadcastCycle:
    if data[:4] != CYCLE_MAGIC:
        raise BadMagicError("not a cycle file")
    if len(data) < 5:
        raise TruncatedError("cycle header truncated")
    k = data[4]
    _check_k(k)
    n = 1 << k
    body = data[5:]
    if len(body) < 8 * n:
        raise TruncatedError(f"cycle of k={k} needs {8 * n} key bytes, got {len(body)}")
    if len(body) > 8 * n:
        raise TrailingDataError(f"{len(body) - 8 * n} bytes after the keys")
    keys = struct.unpack(f">{n}Q", body)
    if any(a > b for a, b in zip(keys, keys[1:])):
        raise UnsortedCycleError("cycle keys are not sorted")
    return BroadcastCycle(k, keys)

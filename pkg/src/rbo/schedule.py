"""Broadcast cycle construction and the slot -> frame mapping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .bitrev import MAX_K, check_width, reverse_bits

KEY_MAX = (1 << 64) - 1


def _check_key(key: int) -> None:
    if not 0 <= key <= KEY_MAX:
        raise ValueError(f"key {key} is not a 64-bit unsigned integer")


@dataclass(frozen=True)
class Frame:
    k: int
    slot: int
    index: int
    key: int
    payload: bytes = b""

    def __post_init__(self):
        check_width(self.k)
        if not 0 <= self.slot < 1 << self.k:
            raise ValueError(f"slot {self.slot} outside a 2^{self.k} cycle")
        if self.index != reverse_bits(self.slot, self.k):
            raise ValueError(f"index {self.index} is not rev_{self.k}({self.slot})")
        _check_key(self.key)


@dataclass(frozen=True)
class BroadcastCycle:
    """Sorted keys of length ``2^k``; slot ``t`` carries ``sorted_keys[rev_k(t)]``."""

    k: int
    sorted_keys: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        check_width(self.k)
        if len(self.sorted_keys) != 1 << self.k:
            raise ValueError(f"cycle of k={self.k} needs {1 << self.k} keys, got {len(self.sorted_keys)}")
        prev = -1
        for key in self.sorted_keys:
            _check_key(key)
            if key < prev:
                raise ValueError("sorted_keys must be non-decreasing")
            prev = key

    @property
    def n(self) -> int:
        return 1 << self.k

    def frame_at(self, t: int, payload: bytes = b"") -> Frame:
        """The frame broadcast at broadcaster time ``t`` (reduced mod n)."""
        if t < 0:
            raise ValueError("broadcaster time must be non-negative")
        slot = t & (self.n - 1)
        index = reverse_bits(slot, self.k)
        return Frame(self.k, slot, index, self.sorted_keys[index], payload)


def build_cycle(keys: Iterable[int]) -> BroadcastCycle:
    """Sort ``keys`` and pad with copies of the maximum up to a power of two."""
    ordered = sorted(keys)
    if not ordered:
        raise ValueError("no keys")
    k = (len(ordered) - 1).bit_length()
    if k > MAX_K:
        raise ValueError(f"{len(ordered)} keys exceed 2^{MAX_K}")
    ordered.extend([ordered[-1]] * ((1 << k) - len(ordered)))
    return BroadcastCycle(k, tuple(ordered))

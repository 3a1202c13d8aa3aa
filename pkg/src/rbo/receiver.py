"""Receiver side of the protocol: an interval search over sorted positions.

The receiver keeps two position bounds ``lb``/``ub`` and only powers its
radio in slots whose bit reversal falls between them. Every key received
outside the query interval clips one of the bounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .bitrev import check_width, reverse_bits
from .nsi import nsi_fast
from .schedule import _check_key

#: Passed to :meth:`ReceiverState.on_frame` for a failed reception.
LOSS = None


@dataclass(frozen=True)
class QueryInterval:
    kappa_lo: int
    kappa_hi: int

    def __post_init__(self):
        _check_key(self.kappa_lo)
        _check_key(self.kappa_hi)
        if self.kappa_lo > self.kappa_hi:
            raise ValueError(f"empty query bounds: {self.kappa_lo} > {self.kappa_hi}")

    def __contains__(self, key: object) -> bool:
        return isinstance(key, int) and self.kappa_lo <= key <= self.kappa_hi


class EventKind(enum.Enum):
    HIT = "hit"
    NARROWED_LOW = "narrowed_low"
    NARROWED_HIGH = "narrowed_high"
    SKIPPED = "skipped"
    RECEPTION_FAILED = "reception_failed"
    CONCLUDED_EMPTY = "concluded_empty"


class ReceiverEvent(NamedTuple):
    kind: EventKind
    # key for HIT, the new bound for NARROWED_*, otherwise None
    value: Optional[int] = None


class ProtocolError(RuntimeError):
    """The driver violated the receiver's calling contract."""


@dataclass
class ReceiverState:
    k: int
    query: QueryInterval
    lb: int
    ub: int

    def is_done(self) -> bool:
        """True once the bounds crossed: no key of the cycle is in the query."""
        return self.lb > self.ub

    def should_listen(self, slot: int) -> bool:
        return self.lb <= reverse_bits(slot, self.k) <= self.ub

    def on_frame(self, slot: int, received_key: Optional[int]) -> ReceiverEvent:
        """Apply one wake-up at ``slot``; ``received_key`` is :data:`LOSS` on failure."""
        if self.is_done():
            raise ProtocolError("receiver already concluded the query is empty")
        x = reverse_bits(slot, self.k)
        if not self.lb <= x <= self.ub:
            raise ProtocolError(f"slot {slot} (index {x}) outside [{self.lb}, {self.ub}]")
        if received_key is LOSS:
            return ReceiverEvent(EventKind.RECEPTION_FAILED)
        if received_key < self.query.kappa_lo:
            self.lb = x + 1
            return ReceiverEvent(EventKind.NARROWED_LOW, self.lb)
        if received_key > self.query.kappa_hi:
            self.ub = x - 1
            return ReceiverEvent(EventKind.NARROWED_HIGH, self.ub)
        return ReceiverEvent(EventKind.HIT, received_key)

    def next_wakeup(self, current_slot: int) -> int:
        """The earliest slot after ``current_slot`` the receiver must listen to."""
        if self.is_done():
            raise ProtocolError("no further wake-ups: the search concluded")
        return nsi_fast(self.k, current_slot, self.lb, self.ub)


def start(k: int, query: QueryInterval) -> ReceiverState:
    check_width(k)
    return ReceiverState(k, query, 0, (1 << k) - 1)

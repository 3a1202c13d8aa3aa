"""Next slot after ``t`` whose k-bit reversal lies in ``[r1, r2]``.

:func:`nsi_fast` walks the segment decomposition of the slots after ``t``
until a segment's index progression meets ``[r1, r2]``, then descends the
BST embedded in that segment. Every multiply/divide/modulo by a power of two
is a shift or a mask, and only a fixed handful of scalars is live.
"""

from __future__ import annotations

from typing import NamedTuple

from .bitrev import _REV8, check_width, reverse_bits_naive


class NsiTrace(NamedTuple):
    slot: int
    segment_steps: int
    zero_run_steps: int
    search_steps: int


def _check_args(k: int, t: int, r1: int, r2: int) -> None:
    check_width(k)
    n = 1 << k
    if not 0 <= t < n:
        raise ValueError(f"slot {t} outside [0, {n - 1}]")
    if not 0 <= r1 <= r2 < n:
        raise ValueError(f"need 0 <= r1 <= r2 < {n}, got r1={r1}, r2={r2}")


def nsi_trace(k: int, t: int, r1: int, r2: int) -> NsiTrace:
    """:func:`nsi_fast` plus its loop iteration counts."""
    _check_args(k, t, r1, r2)
    if k == 0:
        return NsiTrace(0, 0, 0, 0)
    rev8 = _REV8
    shift = 64 - k
    mask = (1 << k) - 1

    nxt = (t + 1) & mask
    l = 0
    steps = zsteps = 0
    while True:
        steps += 1
        cur = nxt
        while l < k and not cur & ((2 << l) - 1):
            l += 1
            zsteps += 1
        x1 = int.from_bytes(cur.to_bytes(8, "little").translate(rev8), "big") >> shift
        nxt = (cur + (1 << l)) & mask
        x2 = int.from_bytes((cur + (1 << l) - 1).to_bytes(8, "little").translate(rev8), "big") >> shift
        gap = k - l
        # ceil((r1 - x1) / 2^gap) <= floor((r2 - x1) / 2^gap)
        if r1 <= x2 and r2 >= x1 and -((x1 - r1) >> gap) <= (r2 - x1) >> gap:
            break

    c = 1 << (k - 1)
    search = 0
    while x1 < r1 or x1 > r2:
        if x1 < r1:
            x1 += c
        else:
            x1 -= c
        c >>= 1
        search += 1
    slot = int.from_bytes(x1.to_bytes(8, "little").translate(rev8), "big") >> shift
    return NsiTrace(slot, steps, zsteps, search)


def nsi_fast(k: int, t: int, r1: int, r2: int) -> int:
    """Earliest slot ``(t + d) mod 2^k``, ``d > 0``, whose reversal is in ``[r1, r2]``.

    When the only such slot is ``t`` itself the answer is ``t`` (``d = 2^k``).
    """
    return nsi_trace(k, t, r1, r2).slot


def nsi_oracle(k: int, t: int, r1: int, r2: int) -> int:
    """Reference answer by scanning ``d = 1, 2, ...``."""
    _check_args(k, t, r1, r2)
    n = 1 << k
    for d in range(1, n + 1):
        slot = (t + d) % n
        if r1 <= reverse_bits_naive(slot, k) <= r2:
            return slot
    raise AssertionError("unreachable: a full cycle visits every index")

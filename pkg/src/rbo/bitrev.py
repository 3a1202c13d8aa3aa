"""Bit reversal, the start-slot segment decomposition and the implicit BST
that bit reversal lays over each segment.

All set-valued results are :class:`Progression` descriptors (start, stride,
count); they are never materialized except when a caller iterates them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

MAX_K = 62

_REV8 = bytes(int(f"{b:08b}"[::-1], 2) for b in range(256))


def check_width(k: int) -> None:
    if not 0 <= k <= MAX_K:
        raise ValueError(f"bit width k={k} outside [0, {MAX_K}]")


def _check_slot(x: int, k: int) -> None:
    check_width(k)
    if not 0 <= x < 1 << k:
        raise ValueError(f"value {x} outside [0, 2^{k} - 1]")


def reverse_bits(x: int, k: int) -> int:
    """Return the k-bit reversal of ``x``.

    The whole 64-bit word is reversed (byte order swap plus a per-byte
    table) and shifted right by ``64 - k``.
    """
    _check_slot(x, k)
    return int.from_bytes(x.to_bytes(8, "little").translate(_REV8), "big") >> (64 - k)


def reverse_bits_naive(x: int, k: int) -> int:
    """Per-bit loop reversal; independent of :func:`reverse_bits`."""
    _check_slot(x, k)
    y = 0
    for _ in range(k):
        y = (y << 1) | (x & 1)
        x >>= 1
    return y


def trailing_zero_run(t: int, k: int) -> int:
    """Largest ``l <= k`` with ``t mod 2^l == 0`` (``k`` for ``t == 0``)."""
    _check_slot(t, k)
    if t == 0:
        return k
    return (t & -t).bit_length() - 1


@dataclass(frozen=True)
class Progression:
    """The arithmetic progression ``{start + stride*j : 0 <= j < count}``."""

    start: int
    stride: int
    count: int

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.start, self.start + self.stride * self.count, self.stride))

    def __len__(self) -> int:
        return self.count

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, int):
            return False
        j, rem = divmod(x - self.start, self.stride)
        return rem == 0 and 0 <= j < self.count

    @property
    def last(self) -> int:
        return self.start + self.stride * (self.count - 1)


@dataclass(frozen=True)
class Segment:
    """One entry ``(t_i, l_i)`` of the decomposition of the cycle after a
    start slot.

    Its slot range is ``[t_i, t_i + 2^l_i - 1]`` and the bit reversals of
    those slots form the progression :attr:`indices`.
    """

    k: int
    t: int
    l: int

    @property
    def x_start(self) -> int:
        return reverse_bits(self.t, self.k)

    @property
    def x_stride(self) -> int:
        return 1 << (self.k - self.l)

    @property
    def x_count(self) -> int:
        return 1 << self.l

    @property
    def slots(self) -> range:
        return range(self.t, self.t + (1 << self.l))

    @property
    def indices(self) -> Progression:
        return Progression(self.x_start, self.x_stride, self.x_count)

    def level_slots(self, l: int) -> range:
        """Slots ``[t + floor(2^(l-1)), t + 2^l - 1]``: one BST level."""
        self._check_level(l)
        return range(self.t + ((1 << l) >> 1), self.t + (1 << l))

    def level_indices(self, l: int) -> Progression:
        """Closed form of the bit reversals of :meth:`level_slots`."""
        self._check_level(l)
        half = (1 << l) >> 1
        return Progression(
            reverse_bits(self.t + half, self.k), 1 << (self.k - l + 1), max(half, 1)
        )

    def prefix_indices(self, l: int) -> Progression:
        """Closed form of the union of levels ``0..l``."""
        self._check_level(l)
        return Progression(self.x_start, 1 << (self.k - l), 1 << l)

    def _check_level(self, l: int) -> None:
        if not 0 <= l <= self.l:
            raise ValueError(f"level {l} outside [0, {self.l}]")


def decompose(k: int, s: int) -> list[Segment]:
    """Split the slots following start slot ``s`` into segments.

    Each segment starts at the next slot (mod 2^k) with a strictly longer run
    of trailing zero bits; the list ends with the segment anchored at slot 0,
    which spans the whole cycle.
    """
    _check_slot(s, k)
    mask = (1 << k) - 1
    t = s
    out = []
    while True:
        l = trailing_zero_run(t, k)
        out.append(Segment(k, t, l))
        if t == 0:
            return out
        t = (t + (1 << l)) & mask


def _check_universe(values: Sequence[int] | Progression, bits: int) -> None:
    lo, hi = (values.start, values.last) if isinstance(values, Progression) else (min(values), max(values))
    if lo < 0 or hi >= 1 << bits:
        raise ValueError(f"values [{lo}, {hi}] leave [0, 2^{bits} - 1]")


def descendant(k: int, x: int, path: Sequence[int], *, universe: int | None = None) -> int:
    """``x + sum(2^(k-i) * c_i)`` for the path ``c_1..c_d`` of +-1 steps.

    The result must lie in ``[0, 2^universe - 1]`` (``universe`` defaults to
    ``k``).
    """
    if len(path) > k:
        raise ValueError(f"path of length {len(path)} deeper than k={k}")
    y = x
    for i, c in enumerate(path, start=1):
        if c not in (-1, 1):
            raise ValueError(f"path step {c!r} is not +-1")
        y += c << (k - i)
    _check_universe([x, y], k if universe is None else universe)
    return y


def level(k: int, d: int, x: int, *, universe: int | None = None) -> Progression:
    """The ``2^d`` descendants of ``x`` at depth ``d``."""
    if not 0 <= d <= k:
        raise ValueError(f"depth {d} outside [0, {k}]")
    if d == 0:
        p = Progression(x, 1, 1)
    else:
        p = Progression(x - (((1 << d) - 1) << (k - d)), 1 << (k - d + 1), 1 << d)
    _check_universe(p, k + 1 if universe is None else universe)
    return p


def subtree(k: int, d: int, x: int, *, universe: int | None = None) -> Progression:
    """All descendants of ``x`` at depths ``0..d``:
    ``{x + i*2^(k-d) : |i| < 2^d}``.

    A depth-``k`` tree rooted at ``2^k`` covers ``[1, 2^(k+1) - 1]``, so the
    default universe is ``k + 1`` bits.
    """
    if not 0 <= d <= k:
        raise ValueError(f"depth {d} outside [0, {k}]")
    half = (1 << d) - 1
    p = Progression(x - (half << (k - d)), 1 << (k - d), 2 * half + 1)
    _check_universe(p, k + 1 if universe is None else universe)
    return p

"""Exhaustive property suites over small cycles.

Each suite compares a closed form or fast path against brute-force
enumeration and returns a :class:`CheckResult` carrying the first
counterexample it finds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional

import numpy as np

from .bitrev import (
    decompose,
    descendant,
    level,
    reverse_bits,
    reverse_bits_naive,
    subtree,
)
from .nsi import nsi_oracle, nsi_trace
from .sim import exhaustive_bound_check


@dataclass
class CheckResult:
    name: str
    k: int
    cases: int = 0
    failures: int = 0
    witness: Optional[Any] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def fail(self, witness: Any) -> None:
        self.failures += 1
        if self.witness is None:
            self.witness = witness

    def expect(self, ok: bool, witness: Any) -> None:
        self.cases += 1
        if not ok:
            self.fail(witness)


def check_reversal(k: int) -> CheckResult:
    res = CheckResult("reversal", k)
    n = 1 << k
    image = set()
    for x in range(n):
        y = reverse_bits(x, k)
        image.add(y)
        res.expect(y == reverse_bits_naive(x, k) and reverse_bits(y, k) == x, x)
    res.expect(image == set(range(n)), "not a bijection")
    return res


def _rev_image(k: int, slots: Iterable[int]) -> set[int]:
    return {reverse_bits_naive(y, k) for y in slots}


def check_segments(k: int) -> CheckResult:
    """Decomposition shape plus the three progression identities."""
    res = CheckResult("segments", k)
    n = 1 << k
    for s in range(n):
        segs = decompose(k, s)
        ls = [g.l for g in segs]
        covered = [y for g in segs[:-1] for y in g.slots]
        res.expect(
            segs[0].t == s
            and segs[-1].t == 0 and segs[-1].l == k
            and all(a < b for a, b in zip(ls, ls[1:]))
            and len(segs) <= k + 1
            and covered == list(range(s, n) if s else []),
            ("shape", s),
        )
        for i, g in enumerate(segs):
            ok = g.t % (1 << g.l) == 0 and (g.l == k or g.t % (2 << g.l) != 0)
            res.expect(ok, ("anchor", s, i))
            # whole segment
            res.expect(
                g.x_start < g.x_stride and set(g.indices) == _rev_image(k, g.slots),
                ("X_i", s, i),
            )
            for l in range(g.l + 1):
                lvl = g.level_indices(l)
                res.expect(
                    lvl.start < 1 << (k - l + 1) and set(lvl) == _rev_image(k, g.level_slots(l)),
                    ("X_il", s, i, l),
                )
                pre = g.prefix_indices(l)
                union = set().union(*(_rev_image(k, g.level_slots(j)) for j in range(l + 1)))
                res.expect(pre.start < 1 << (k - l) and set(pre) == union, ("prefix", s, i, l))
    return res


def _levels_brute(k: int, x: int, d: int, universe: int) -> list[set[int]]:
    """Descendants of ``x`` grouped by depth ``0..d`` via explicit paths."""
    return [
        {descendant(k, x, c, universe=universe) for c in itertools.product((-1, 1), repeat=j)}
        for j in range(d + 1)
    ]


def check_bst(k: int) -> CheckResult:
    """Tree identities on the path-defined levels and subtrees, then the
    embedding of each segment's index set as a right-leaning BST."""
    res = CheckResult("bst", k)
    u = k + 2
    # roots in [2^k, 3*2^k) keep every tree below in [0, 2^(k+2))
    for x in range(1 << k, 3 << k):
        lv = _levels_brute(k, x, k, u)
        for d in range(k + 1):
            st = set().union(*lv[: d + 1])
            w = ("tree", x, d)
            res.expect(len(lv[d]) == 1 << d and lv[d] == set(level(k, d, x, universe=u)), w + ("a",))
            res.expect(lv[d] == (st - set().union(*lv[:d]) if d else {x}), w + ("b",))
            res.expect(len(st) == (2 << d) - 1, w + ("c",))
            res.expect(st == set(subtree(k, d, x, universe=u)), w + ("d",))
            if d == 0:
                continue
            left, right = x - (1 << (k - 1)), x + (1 << (k - 1))
            st_l = set().union(*_levels_brute(k - 1, left, d - 1, u))
            st_r = set().union(*_levels_brute(k - 1, right, d - 1, u))
            res.expect(
                {x} | st_r == {x + i * (1 << (k - d)) for i in range(1 << d)}, w + ("e",)
            )
            res.expect(st == st_l | {x} | st_r, w + ("f",))
        for d in range(k):
            left, right = x - (1 << (k - 1)), x + (1 << (k - 1))
            step = 1 << (k - 1 - d)
            res.expect(
                max(subtree(k - 1, d, left, universe=u)) + step == x
                == min(subtree(k - 1, d, right, universe=u)) - step,
                ("tree", x, d, "g"),
            )

    n = 1 << k
    for s in range(n):
        for i, g in enumerate(decompose(k, s)):
            r, l = reverse_bits(g.t, k), g.l
            w = ("segment-tree", s, i)
            res.expect(_rev_image(k, g.level_slots(0)) == {r}, w + ("a",))
            if l == 0:
                res.expect(_rev_image(k, g.slots) == {r}, w + ("b",))
                continue
            root = descendant(k, r, (1,))
            lv = _levels_brute(k - 1, root, l - 1, k)
            for d in range(1, l + 1):
                union = _rev_image(k, range(g.t, g.t + (1 << d)))
                res.expect(union == {r}.union(*lv[:d]), w + ("a", d))
                res.expect(_rev_image(k, g.level_slots(d)) == lv[d - 1], w + ("c", d))
            xs = _rev_image(k, g.slots)
            res.expect(
                xs == {r}.union(*lv) and xs == {r} | set(subtree(k - 1, l - 1, root, universe=k)),
                w + ("b",),
            )
            # shallower tree levels are broadcast strictly earlier
            depth_revs = [[reverse_bits(r, k)]] + [[reverse_bits(x, k) for x in lvl] for lvl in lv]
            res.expect(
                all(max(a) < min(b) for a, b in zip(depth_revs, depth_revs[1:])), w + ("d",)
            )
    return res


def oracle_table(k: int, t: int) -> np.ndarray:
    """``table[r1, r2]`` = next slot after ``t`` whose reversal is in ``[r1, r2]``
    (entries with ``r1 > r2`` are meaningless).

    Scans ``d = 1..n`` once, recording when each index first shows up, then
    takes range minima of those delays.
    """
    n = 1 << k
    first = np.empty(n, dtype=np.int64)
    for d in range(1, n + 1):
        first[reverse_bits_naive((t + d) % n, k)] = d
    big = np.iinfo(np.int64).max
    m = np.where(np.triu(np.ones((n, n), dtype=bool)), first[None, :], big)
    delay = np.minimum.accumulate(m, axis=1)
    return (t + np.where(delay == big, 0, delay)) % n


def check_nsi(k: int, fast: Callable = nsi_trace) -> CheckResult:
    """Every ``(t, r1, r2)``: answer equals the scan and loop counts respect
    ``k + 1`` / ``k + 1`` / ``k``."""
    res = CheckResult("nsi", k)
    n = 1 << k
    for t in range(n):
        table = oracle_table(k, t).tolist()
        for r1 in range(n):
            row = table[r1]
            for r2 in range(r1, n):
                tr = fast(k, t, r1, r2)
                res.cases += 1
                if (
                    tr.slot != row[r2]
                    or tr.segment_steps > k + 1
                    or tr.zero_run_steps > k + 1
                    or tr.search_steps > k
                ):
                    res.fail((t, r1, r2, tuple(tr), row[r2]))
    return res


def check_nsi_random(k: int, cases: int, seed: int = 0, fast: Callable = nsi_trace) -> CheckResult:
    """Seeded random ``(t, r1, r2)`` against the scanning oracle."""
    res = CheckResult("nsi-random", k)
    gen = np.random.default_rng([seed, k])
    n = 1 << k
    t_all = gen.integers(0, n, size=cases).tolist()
    pairs = np.sort(gen.integers(0, n, size=(cases, 2)), axis=1).tolist()
    worst = [0, 0, 0]
    for t, (r1, r2) in zip(t_all, pairs):
        tr = fast(k, t, r1, r2)
        worst = [max(a, b) for a, b in zip(worst, tr[1:])]
        res.expect(
            tr.slot == nsi_oracle(k, t, r1, r2)
            and tr.segment_steps <= k + 1
            and tr.zero_run_steps <= k + 1
            and tr.search_steps <= k,
            (t, r1, r2, tuple(tr)),
        )
    res.detail = f"max loop counts (segment, zero-run, search) = {tuple(worst)}"
    return res


def check_bounds(k: int) -> CheckResult:
    rep = exhaustive_bound_check(k)
    res = CheckResult("energy-bounds", k, cases=rep.sessions, failures=rep.violation_count)
    if rep.violations:
        res.witness = rep.violations[0]
    res.detail = (
        f"max en(tau)={rep.max_en_tau} (bound {rep.en_bound}) at (s, lo, hi)={rep.en_witness}; "
        f"max ee={rep.max_ee} (bound {rep.ee_bound}) at {rep.ee_witness}"
    )
    return res


SUITES = {
    "reversal": check_reversal,
    "segments": check_segments,
    "bst": check_bst,
    "nsi": check_nsi,
    "energy-bounds": check_bounds,
}

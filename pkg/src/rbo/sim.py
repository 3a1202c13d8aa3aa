"""Receiver sessions over perfect or lossy channels, with energy accounting.

Receiver time ``t`` counts slots since the start slot ``s``; broadcaster slot
is ``(s + t) mod n``. Wake-ups are counted from ``t = 0`` inclusive. A
wake-up is a *hit* when the slot's index lies in ``[r', r'']`` (the sorted
positions whose keys satisfy the query) and a *miss* otherwise; ``r'`` and
``r''`` are ground truth known only to the harness.
"""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import rng
from .bitrev import reverse_bits
from .receiver import LOSS, EventKind, QueryInterval, ReceiverEvent, start
from .schedule import BroadcastCycle

DEFAULT_CAP_CYCLES = 64


@dataclass(frozen=True)
class ChannelModel:
    """Bernoulli reception with success probability ``p``; ``p == 1`` is perfect."""

    p: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"reception probability must be in (0, 1], got {self.p}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def perfect(cls) -> "ChannelModel":
        return cls(1.0, 0)

    @property
    def is_perfect(self) -> bool:
        return self.p == 1.0

    def success(self, trial: int, t: int) -> bool:
        """Whether a wake-up at receiver time ``t`` of ``trial`` receives its frame."""
        if self.is_perfect:
            return True
        return rng.uniform(rng.trial_key(self.seed, trial), t) < self.p


@dataclass(frozen=True)
class SessionConfig:
    cycle: BroadcastCycle
    query: QueryInterval
    start_slot: int = 0
    channel: ChannelModel = field(default_factory=ChannelModel.perfect)
    horizon_cycles: int = 1
    trial: int = 0

    def __post_init__(self):
        if not 0 <= self.start_slot < self.cycle.n:
            raise ValueError(f"start slot {self.start_slot} outside the cycle")
        if self.horizon_cycles < 1:
            raise ValueError("horizon_cycles must be positive")


@dataclass
class EnergyStats:
    """Per-session counters.

    ``tau`` is the receiver time of the first hit or of concluding that the
    query is empty (None if neither happened within the horizon); ``en_tau``
    counts wake-ups at times ``0..tau``. ``ee_total`` counts successful
    receptions of keys outside the query. ``converged_cycle`` is the receiver
    cycle in which the bounds reached ``(r', r'')``. On a perfect channel
    ``en_tau == hits_to_tau + ee_to_tau``.
    """

    tau: Optional[int] = None
    en_tau: Optional[int] = None
    ee_total: int = 0
    hits: int = 0
    misses_first_cycle: int = 0
    misses_total: int = 0
    converged_cycle: Optional[int] = None
    wakeups: int = 0
    hit_wakeups: int = 0

    @property
    def misses_after_first_cycle(self) -> int:
        return self.misses_total - self.misses_first_cycle


class TraceEntry(NamedTuple):
    t: int
    slot: int
    index: int
    event: ReceiverEvent


class SessionResult(NamedTuple):
    stats: EnergyStats
    trace: list[TraceEntry]


def truth_bounds(cycle: BroadcastCycle, query: QueryInterval) -> tuple[int, int]:
    """``(r', r'')``: first position with key >= lo, last with key <= hi."""
    keys = cycle.sorted_keys
    return bisect.bisect_left(keys, query.kappa_lo), bisect.bisect_right(keys, query.kappa_hi) - 1


def run_session(
    config: SessionConfig,
    *,
    record: bool = True,
    stepping: str = "nsi",
    stop_on_convergence: bool = False,
) -> SessionResult:
    """Drive one receiver from ``start_slot`` for ``horizon_cycles`` cycles.

    ``stepping="nsi"`` sleeps between wake-ups using the receiver's
    next-wake-up computation; ``stepping="scan"`` polls every slot and
    records the skipped ones. Both produce the same statistics.
    """
    if stepping not in ("nsi", "scan"):
        raise ValueError(f"unknown stepping mode {stepping!r}")
    cycle, channel, trial = config.cycle, config.channel, config.trial
    k, n = cycle.k, cycle.n
    keys = cycle.sorted_keys
    r_lo, r_hi = truth_bounds(cycle, config.query)
    state = start(k, config.query)
    stats = EnergyStats()
    trace: list[TraceEntry] = []
    horizon = config.horizon_cycles * n
    if state.lb == r_lo and state.ub == r_hi:
        stats.converged_cycle = 0

    t, slot = 0, config.start_slot
    while t < horizon:
        x = reverse_bits(slot, k)
        if stepping == "scan" and not state.lb <= x <= state.ub:
            if record:
                trace.append(TraceEntry(t, slot, x, ReceiverEvent(EventKind.SKIPPED)))
            t += 1
            slot = (slot + 1) & (n - 1)
            continue

        ok = channel.success(trial, t)
        event = state.on_frame(slot, keys[x] if ok else LOSS)
        stats.wakeups += 1
        in_range = r_lo <= x <= r_hi
        if in_range:
            stats.hit_wakeups += 1
        else:
            stats.misses_total += 1
            if t < n:
                stats.misses_first_cycle += 1
            if ok:
                stats.ee_total += 1
        if event.kind is EventKind.HIT:
            stats.hits += 1
        if record:
            trace.append(TraceEntry(t, slot, x, event))
        done = state.is_done()
        if stats.tau is None and (in_range or done):
            stats.tau, stats.en_tau = t, stats.wakeups
        if stats.converged_cycle is None and state.lb == r_lo and state.ub == r_hi:
            stats.converged_cycle = t // n
        if done:
            if record:
                trace.append(TraceEntry(t, slot, x, ReceiverEvent(EventKind.CONCLUDED_EMPTY)))
            break
        if stop_on_convergence and stats.converged_cycle is not None and stats.tau is not None:
            break

        if stepping == "scan":
            t += 1
            slot = (slot + 1) & (n - 1)
        else:
            nxt = state.next_wakeup(slot)
            t += (nxt - slot - 1) % n + 1
            slot = nxt
    return SessionResult(stats, trace)


# ---------------------------------------------------------------- Monte Carlo


def miss_bound_total(k: int, p: float) -> float:
    return (8 * k + 4) / p + 2 * (1 - p) / p**2


def miss_bound_first_cycle(k: int, p: float) -> float:
    return (4 * k + 2) / p


def miss_bound_after_first_cycle(p: float) -> float:
    return 2 * (1 - p) / p**2


@dataclass
class Summary:
    mean: float
    stderr: float
    max: int

    @classmethod
    def of(cls, values: Sequence[int]) -> "Summary":
        a = np.asarray(values, dtype=float)
        se = float(a.std(ddof=1) / math.sqrt(len(a))) if len(a) > 1 else 0.0
        return cls(float(a.mean()), se, int(a.max()))


@dataclass
class MonteCarloReport:
    k: int
    p: float
    seed: int
    trials: int
    empty_query: bool
    misses_total: Summary
    misses_first_cycle: Summary
    misses_after_first_cycle: Summary
    bound_total: float
    bound_first_cycle: Optional[float]
    bound_after_first_cycle: float
    pass_total: bool
    pass_first_cycle: Optional[bool]
    pass_after_first_cycle: bool
    hit_wakeups: int
    hit_receptions: int
    reception_rate: Optional[float]
    reception_stderr: Optional[float]
    pass_reception_rate: Optional[bool]
    capped_trials: int

    @property
    def passed(self) -> bool:
        flags = [self.pass_total, self.pass_first_cycle, self.pass_after_first_cycle, self.pass_reception_rate]
        return all(f for f in flags if f is not None)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _run_trial(args: tuple[SessionConfig, bool]) -> EnergyStats:
    config, stop = args
    return run_session(config, record=False, stop_on_convergence=stop).stats


def run_trials(
    template: SessionConfig,
    trials: int,
    *,
    stop_on_convergence: bool = True,
    workers: int = 1,
) -> list[EnergyStats]:
    """Stats of ``trials`` sessions differing only in their trial index, in trial order."""
    if trials < 1:
        raise ValueError("need at least one trial")
    jobs = [(replace(template, trial=i), stop_on_convergence) for i in range(trials)]
    if workers <= 1:
        return [_run_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trial, jobs, chunksize=max(1, trials // (4 * workers))))


def summarize(template: SessionConfig, results: Sequence[EnergyStats]) -> MonteCarloReport:
    """Compare the sample means of ``results`` with the expected-miss bounds."""
    k, p = template.cycle.k, template.channel.p
    r_lo, r_hi = truth_bounds(template.cycle, template.query)
    empty = r_lo > r_hi
    total = Summary.of([r.misses_total for r in results])
    first = Summary.of([r.misses_first_cycle for r in results])
    after = Summary.of([r.misses_after_first_cycle for r in results])
    b_total = miss_bound_total(k, p)
    b_first = miss_bound_first_cycle(k, p) if empty else None
    b_after = miss_bound_after_first_cycle(p)

    wakes = sum(r.hit_wakeups for r in results)
    got = sum(r.hits for r in results)
    rate = se = ok_rate = None
    if wakes:
        rate = got / wakes
        se = math.sqrt(p * (1 - p) / wakes)
        ok_rate = abs(rate - p) <= 3 * se
    capped = sum(1 for r in results if r.converged_cycle is None)
    return MonteCarloReport(
        k=k,
        p=p,
        seed=template.channel.seed,
        trials=len(results),
        empty_query=empty,
        misses_total=total,
        misses_first_cycle=first,
        misses_after_first_cycle=after,
        bound_total=b_total,
        bound_first_cycle=b_first,
        bound_after_first_cycle=b_after,
        pass_total=total.mean <= b_total,
        pass_first_cycle=None if b_first is None else first.mean <= b_first,
        pass_after_first_cycle=after.mean <= b_after,
        hit_wakeups=wakes,
        hit_receptions=got,
        reception_rate=rate,
        reception_stderr=se,
        pass_reception_rate=ok_rate,
        capped_trials=capped,
    )


def run_monte_carlo(
    template: SessionConfig,
    trials: int,
    *,
    stop_on_convergence: bool = True,
    workers: int = 1,
) -> MonteCarloReport:
    """Independent sessions (trial ``i`` draws from stream ``i`` of the master
    seed) aggregated against the expected-miss bounds.

    With ``stop_on_convergence`` a session ends once its bounds equal
    ``(r', r'')`` and ``tau`` is known; no miss can happen after that point.
    """
    results = run_trials(template, trials, stop_on_convergence=stop_on_convergence, workers=workers)
    return summarize(template, results)


# ---------------------------------------------------- exhaustive enumeration


def distinct_cycle(k: int) -> BroadcastCycle:
    """Cycle with keys ``10, 20, ..., 10 * 2^k``."""
    return BroadcastCycle(k, tuple(10 * (i + 1) for i in range(1 << k)))


def query_grid(cycle: BroadcastCycle) -> tuple[np.ndarray, np.ndarray]:
    """Every query position on a distinct-key cycle.

    One query ``[key_a, key_b]`` per pair ``a <= b`` plus one point query in
    each of the ``n + 1`` gaps around the keys.
    """
    keys = np.asarray(cycle.sorted_keys, dtype=np.int64)
    n = cycle.n
    if n > 1 and not np.all(np.diff(keys) >= 2):
        raise ValueError("query grid needs keys at least 2 apart")
    if keys[0] < 1:
        raise ValueError("query grid needs a gap below the smallest key")
    a, b = np.triu_indices(n)
    gaps = np.concatenate(([keys[0] - 1], keys + 1))
    lo = np.concatenate((keys[a], gaps))
    hi = np.concatenate((keys[b], gaps))
    return lo, hi


@dataclass
class BatchSessions:
    """Perfect-channel outcome of one start slot against many queries."""

    tau: np.ndarray
    en_tau: np.ndarray
    ee: np.ndarray
    lb: np.ndarray
    ub: np.ndarray


def batch_sessions(cycle: BroadcastCycle, lo: np.ndarray, hi: np.ndarray, s: int) -> BatchSessions:
    """Run the receiver for one full cycle from slot ``s`` for every query at once.

    The protocol is applied in lockstep over numpy arrays of ``(lb, ub)``.
    One cycle suffices on a perfect channel: by its end every position has
    been broadcast once, so the bounds sit at ``(r', r'')``.
    """
    k, n = cycle.k, cycle.n
    keys = np.asarray(cycle.sorted_keys, dtype=np.int64)
    q = len(lo)
    lb = np.zeros(q, dtype=np.int64)
    ub = np.full(q, n - 1, dtype=np.int64)
    active = np.ones(q, dtype=bool)
    en = np.zeros(q, dtype=np.int64)
    ee = np.zeros(q, dtype=np.int64)
    tau = np.full(q, -1, dtype=np.int64)
    en_tau = np.full(q, -1, dtype=np.int64)
    for t in range(n):
        x = reverse_bits((s + t) & (n - 1), k)
        key = keys[x]
        listen = active & (lb <= x) & (ub >= x)
        low = listen & (key < lo)
        high = listen & (key > hi)
        hit = listen & ~(low | high)
        en += listen
        ee += low | high
        lb[low] = x + 1
        ub[high] = x - 1
        concluded = active & (lb > ub)
        active &= ~concluded
        first = (tau < 0) & (hit | concluded)
        tau[first] = t
        en_tau[first] = en[first]
    return BatchSessions(tau, en_tau, ee, lb, ub)


@dataclass
class BoundReport:
    k: int
    sessions: int
    max_en_tau: int
    en_witness: tuple[int, int, int]  # (start slot, lo, hi)
    max_ee: int
    ee_witness: tuple[int, int, int]
    violations: list[tuple[str, int, int, int]] = field(default_factory=list)
    violation_count: int = 0

    @property
    def en_bound(self) -> int:
        return 2 * self.k + 1

    @property
    def ee_bound(self) -> int:
        return 4 * self.k + 2

    @property
    def passed(self) -> bool:
        return self.violation_count == 0


def exhaustive_bound_check(k: int, cycle: Optional[BroadcastCycle] = None, *, max_witnesses: int = 10) -> BoundReport:
    """Every start slot against every query position on a perfect channel.

    Flags a session when it does not resolve within the first cycle, when
    more than ``2k + 1`` wake-ups precede and include the first hit or the
    empty verdict, when more than ``4k + 2`` keys outside the query are ever
    received, or when the bounds do not end at ``(r', r'')``. Extra energy
    never decreases, so its final value bounds every prefix.
    """
    cycle = distinct_cycle(k) if cycle is None else cycle
    if cycle.k != k:
        raise ValueError("cycle width does not match k")
    n = cycle.n
    lo, hi = query_grid(cycle)
    keys = np.asarray(cycle.sorted_keys, dtype=np.int64)
    r_lo = np.searchsorted(keys, lo, side="left")
    r_hi = np.searchsorted(keys, hi, side="right") - 1

    report = BoundReport(k, 0, -1, (0, 0, 0), -1, (0, 0, 0))
    for s in range(n):
        b = batch_sessions(cycle, lo, hi, s)
        report.sessions += len(lo)
        i = int(np.argmax(b.en_tau))
        if b.en_tau[i] > report.max_en_tau:
            report.max_en_tau, report.en_witness = int(b.en_tau[i]), (s, int(lo[i]), int(hi[i]))
        j = int(np.argmax(b.ee))
        if b.ee[j] > report.max_ee:
            report.max_ee, report.ee_witness = int(b.ee[j]), (s, int(lo[j]), int(hi[j]))
        converged = (b.lb == r_lo) & (b.ub == r_hi)
        checks = (
            ("tau >= n", (b.tau < 0) | (b.tau >= n)),
            ("en(tau) > 2k+1", b.en_tau > 2 * k + 1),
            ("ee > 4k+2", b.ee > 4 * k + 2),
            ("bounds not at (r', r'') after one cycle", ~converged),
        )
        for name, bad in checks:
            idx = np.flatnonzero(bad)
            report.violation_count += len(idx)
            for q in idx[: max(0, max_witnesses - len(report.violations))]:
                report.violations.append((name, s, int(lo[q]), int(hi[q])))
    return report

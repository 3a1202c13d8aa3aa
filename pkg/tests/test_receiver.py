import pytest
from hypothesis import given, strategies as st

from rbo.receiver import LOSS, EventKind, ProtocolError, QueryInterval, ReceiverState, start
from rbo.sim import truth_bounds
from rbo.schedule import BroadcastCycle


@pytest.mark.parametrize("k, lo, hi, ub", [(3, 35, 45, 7), (0, 0, 0, 0), (5, 7, 7, 31)])
def test_start(k, lo, hi, ub):
    s = start(k, QueryInterval(lo, hi))
    assert (s.lb, s.ub) == (0, ub)
    assert not s.is_done()


def test_query_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        QueryInterval(5, 4)


def test_should_listen():
    q = QueryInterval(35, 45)
    assert all(start(3, q).should_listen(slot) for slot in range(8))
    narrow = ReceiverState(3, q, 3, 3)
    assert narrow.should_listen(6)
    assert not narrow.should_listen(3)


def test_on_frame_branches():
    q = QueryInterval(35, 45)
    s = start(3, q)
    assert s.on_frame(0, 10) == (EventKind.NARROWED_LOW, 1) and s.lb == 1
    assert s.on_frame(1, 50) == (EventKind.NARROWED_HIGH, 3) and s.ub == 3
    narrow = ReceiverState(3, q, 3, 3)
    assert narrow.on_frame(6, 40) == (EventKind.HIT, 40)
    assert narrow.on_frame(6, LOSS).kind is EventKind.RECEPTION_FAILED
    assert (narrow.lb, narrow.ub) == (3, 3)


def test_is_done():
    q = QueryInterval(1, 1)
    assert ReceiverState(3, q, 4, 3).is_done()
    assert not ReceiverState(3, q, 3, 3).is_done()


def test_contract_violations():
    q = QueryInterval(35, 45)
    with pytest.raises(ProtocolError):
        ReceiverState(3, q, 3, 3).on_frame(3, 40)
    with pytest.raises(ProtocolError):
        ReceiverState(3, q, 4, 3).on_frame(0, 40)
    with pytest.raises(ProtocolError):
        ReceiverState(3, q, 4, 3).next_wakeup(0)


@pytest.mark.parametrize(
    "k, lb, ub, cur, want", [(3, 0, 7, 5, 6), (3, 3, 3, 0, 6), (5, 20, 21, 12, 21)]
)
def test_next_wakeup(k, lb, ub, cur, want):
    assert ReceiverState(k, QueryInterval(0, 0), lb, ub).next_wakeup(cur) == want


@given(
    st.lists(st.integers(0, 60), min_size=16, max_size=16),
    st.integers(0, 60),
    st.integers(0, 20),
    st.integers(0, 15),
    st.lists(st.booleans(), min_size=64, max_size=64),
)
def test_narrowing_is_monotone_and_sound(raw, lo, width, s, losses):
    cycle = BroadcastCycle(4, tuple(sorted(raw)))
    q = QueryInterval(lo, lo + width)
    r_lo, r_hi = truth_bounds(cycle, q)
    state = start(4, q)
    slot = s
    for lost in losses:
        if state.is_done():
            break
        x = cycle.frame_at(slot).index
        if state.should_listen(slot):
            before = (state.lb, state.ub)
            ev = state.on_frame(slot, LOSS if lost else cycle.sorted_keys[x])
            assert state.lb >= before[0] and state.ub <= before[1]
            if ev.kind is EventKind.HIT:
                assert ev.value in q
        # nothing in the query is ever excluded
        assert state.lb <= r_lo and state.ub >= r_hi
        slot = (slot + 1) % 16

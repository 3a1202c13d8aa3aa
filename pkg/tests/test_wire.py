import pytest
from hypothesis import given, strategies as st

from rbo.bitrev import reverse_bits
from rbo.schedule import BroadcastCycle, Frame, build_cycle
from rbo.wire import (
    BadMagicError,
    BitWidthError,
    IndexMismatchError,
    SlotRangeError,
    TrailingDataError,
    TruncatedError,
    UnsortedCycleError,
    WireError,
    decode_cycle,
    decode_frame,
    encode_cycle,
    encode_frame,
)

GOLDEN = bytes.fromhex(
    "b1" "02"
    "0000000000000001"
    "0000000000000002"
    "000000000000001e"
    "0000"
)


@st.composite
def frames(draw):
    k = draw(st.integers(0, 62))
    slot = draw(st.integers(0, (1 << k) - 1))
    return Frame(k, slot, reverse_bits(slot, k), draw(st.integers(0, 2**64 - 1)),
                 draw(st.binary(max_size=64)))


def test_golden_encoding():
    f = build_cycle([10, 20, 30]).frame_at(1)
    assert encode_frame(f) == GOLDEN
    assert len(GOLDEN) == 28
    assert decode_frame(GOLDEN) == f


def test_single_slot_frame():
    f = BroadcastCycle(0, (7,)).frame_at(0)
    assert f.index == 0
    assert decode_frame(encode_frame(f)) == f


@given(frames())
def test_round_trip(f):
    data = encode_frame(f)
    assert len(data) == 28 + len(f.payload)
    assert decode_frame(data) == f


def test_oversized_payload_rejected():
    with pytest.raises(WireError):
        encode_frame(Frame(1, 1, 1, 5, bytes(65536)))


def test_corrupt_index_byte():
    bad = bytearray(GOLDEN)
    bad[17] ^= 0x01
    with pytest.raises(IndexMismatchError):
        decode_frame(bytes(bad))


@pytest.mark.parametrize("cut", [0, 1, 10, 27])
def test_truncated_header(cut):
    with pytest.raises(TruncatedError):
        decode_frame(GOLDEN[:cut])


def test_truncated_payload_and_trailing_bytes():
    data = encode_frame(Frame(2, 1, 2, 30, b"abc"))
    with pytest.raises(TruncatedError):
        decode_frame(data[:-1])
    with pytest.raises(TrailingDataError):
        decode_frame(data + b"\x00")


def test_bad_magic_and_width_and_slot():
    with pytest.raises(BadMagicError):
        decode_frame(b"\xb2" + GOLDEN[1:])
    with pytest.raises(BitWidthError):
        decode_frame(GOLDEN[:1] + b"\x3f" + GOLDEN[2:])
    with pytest.raises(SlotRangeError):
        decode_frame(GOLDEN[:1] + b"\x00" + GOLDEN[2:])


@given(frames(), st.data())
def test_single_byte_mutation_is_rejected_or_yields_a_consistent_frame(f, data):
    enc = bytearray(encode_frame(f))
    pos = data.draw(st.integers(0, len(enc) - 1))
    val = data.draw(st.integers(0, 255).filter(lambda v: v != enc[pos]))
    enc[pos] = val
    try:
        g = decode_frame(bytes(enc))
    except WireError:
        return
    # only fields without redundancy (key, payload, or a compatible k) survive
    assert encode_frame(g) == bytes(enc)


def test_cycle_file_round_trip_and_errors():
    c = build_cycle([5, 1, 9])
    data = encode_cycle(c)
    assert data[:5] == b"RBOC\x02" and len(data) == 5 + 8 * 4
    assert decode_cycle(data) == c
    with pytest.raises(BadMagicError):
        decode_cycle(b"RBOX" + data[4:])
    with pytest.raises(TruncatedError):
        decode_cycle(data[:-1])
    with pytest.raises(TrailingDataError):
        decode_cycle(data + b"\x00")
    with pytest.raises(BitWidthError):
        decode_cycle(b"RBOC\x40")
    unsorted = data[:5] + data[13:21] + data[5:13] + data[21:]
    with pytest.raises(UnsortedCycleError):
        decode_cycle(unsorted)

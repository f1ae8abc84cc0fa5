import numpy as np
import pytest
from hypothesis import given, strategies as st

from qdlock.core import (
    Basis, BitString, ChannelParams, ContractError, QubitBlock, QubitSymbol, RngStream, draw_bits,
    xor,
)

B = BitString.from_str


@pytest.mark.parametrize("a,b,expected", [
    ("1011", "0000", "1011"),
    ("1011", "1011", "0000"),
    ("1100", "1010", "0110"),
])
def test_xor_examples(a, b, expected):
    assert xor(B(a), B(b)) == B(expected)


def test_xor_length_mismatch():
    with pytest.raises(ContractError):
        xor(B("101"), B("10"))


bitlists = st.integers(0, 64).flatmap(
    lambda n: st.tuples(*[st.lists(st.integers(0, 1), min_size=n, max_size=n)] * 3))


@given(bitlists)
def test_xor_group_laws(triple):
    a, b, c = (BitString(x) for x in triple)
    zero = BitString.zeros(a.length)
    assert xor(xor(a, b), c) == xor(a, xor(b, c))
    assert xor(a, zero) == a
    assert xor(a, a) == zero


def test_bitstring_indexing():
    s = B("0110")
    assert s.length == len(s) == 4
    assert [s[i] for i in range(4)] == [0, 1, 1, 0]
    with pytest.raises(IndexError):
        s[4]
    with pytest.raises(IndexError):
        s[-1]


def test_bitstring_is_immutable():
    s = B("0110")
    with pytest.raises(ValueError):
        s.bits[0] = 1


def test_bytes_are_msb_first():
    assert B("10000000").to_bytes() == b"\x80"
    assert B("101").to_bytes() == b"\xa0"
    assert BitString.from_bytes(b"\x01") == B("00000001")


@given(st.lists(st.integers(0, 1), max_size=200))
def test_file_form_roundtrip(bits):
    s = BitString(bits)
    data = s.to_file_bytes()
    assert int.from_bytes(data[:8], "little") == len(bits)
    back, off = BitString.from_file_bytes(data)
    assert back == s and off == len(data)


def test_file_form_truncated():
    with pytest.raises(ContractError):
        BitString.from_file_bytes(B("1" * 20).to_file_bytes()[:-1])


def test_from_int_roundtrip():
    assert BitString.from_int(5, 3) == B("101")
    assert B("101").to_int() == 5


def test_draw_bits_empty():
    assert draw_bits(RngStream(1), 0).length == 0


def test_draw_bits_deterministic():
    a, b = RngStream(7, 3), RngStream(7, 3)
    first = [draw_bits(a, 50), draw_bits(a, 50)]
    second = [draw_bits(b, 50), draw_bits(b, 50)]
    assert first == second
    assert first[0] != first[1]


def test_draw_bits_frequency():
    bits = draw_bits(RngStream(11), 10**6).bits
    # binomial 3 sigma = 3 * 0.5 / 1000 = 0.0015 < 0.002
    assert abs(bits.mean() - 0.5) <= 0.002


def test_streams_independent():
    n = 10**6
    a = draw_bits(RngStream(5, 0), n).bits.astype(int)
    b = draw_bits(RngStream(5, 1), n).bits.astype(int)
    c = draw_bits(RngStream(5, 1).substream(2), n).bits.astype(int)
    sigma = 0.5 / np.sqrt(n)
    for x, y in ((a, b), (a, c), (b, c)):
        assert abs((x == y).mean() - 0.5) < 3 * sigma
        assert x.tolist()[:64] != y.tolist()[:64]


def test_seed_range():
    with pytest.raises(ContractError):
        RngStream(1 << 256)
    RngStream((1 << 256) - 1)


def test_channel_params_bounds():
    ChannelParams(0.0, 0.5)
    with pytest.raises(ContractError):
        ChannelParams(1.1, 0.0)
    with pytest.raises(ContractError):
        ChannelParams(0.5, 0.6)


def test_qubit_types():
    q = QubitSymbol(Basis.Y, 1)
    assert q.basis is Basis.Y
    with pytest.raises(ContractError):
        QubitSymbol(Basis.Z, 2)
    blk = QubitBlock.from_symbols([q, QubitSymbol(Basis.Z, 0)])
    assert blk[0] == q and len(blk) == 2
    assert Basis.Z != Basis.Y

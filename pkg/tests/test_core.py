import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wnclab.core import (
    DEFAULT_BODY_LEN,
    Node,
    Packet,
    PacketError,
    compute_crc,
    crc_ok,
    frame_packet,
    next_generation,
    parse_packet,
    seal,
    xor_combine,
)


def crc32_bitwise(data: bytes) -> int:
    """Reference CRC-32/IEEE, one bit at a time, reflected polynomial."""
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            crc = (crc >> 1) ^ (0xEDB88320 if crc & 1 else 0)
    return crc ^ 0xFFFFFFFF


def test_crc_check_value():
    assert compute_crc(b"123456789") == 0xCBF43926
    assert crc32_bitwise(b"123456789") == 0xCBF43926


def test_crc_empty_matches_reference():
    assert compute_crc(b"") == crc32_bitwise(b"") == 0


@given(st.binary(max_size=300))
def test_crc_matches_bitwise_reference(data):
    assert compute_crc(data) == crc32_bitwise(data)
    assert compute_crc(data) == compute_crc(data)


@given(st.binary(min_size=1, max_size=64), st.data())
def test_xor_involution(a, data):
    b = data.draw(st.binary(min_size=len(a), max_size=len(a)))
    assert xor_combine(xor_combine(a, b), a) == b


def test_xor_length_mismatch():
    with pytest.raises(PacketError):
        xor_combine(b"ab", b"abc")


@given(st.binary(min_size=20, max_size=20), st.binary(min_size=20, max_size=20))
def test_xor_recovers_valid_body(pu, pv):
    u, v = seal(pu), seal(pv)
    coded = xor_combine(u, v)
    recovered = xor_combine(coded, u)
    assert recovered == v
    assert crc_ok(recovered)


def test_generation_cyclic_at_reduced_width():
    for bits in (1, 2, 3, 8):
        g = 5 % (1 << bits)
        h = g
        for _ in range(1 << bits):
            h = next_generation(h, bits)
        assert h == g


def test_generation_wraps_at_32_bits():
    assert next_generation(2**32 - 1) == 0
    assert next_generation(7) == 8


@given(
    st.sampled_from([Node.A, Node.B, Node.R]),
    st.sampled_from([Node.A, Node.B, Node.R, Node.BROADCAST]),
    st.integers(0, 2**32 - 1),
    st.binary(min_size=28, max_size=28),
)
def test_frame_parse_roundtrip(src, dst, gen, payload):
    pkt = frame_packet(src, dst, gen, payload, body_len=32)
    assert parse_packet(pkt) == (src, dst, gen, payload)
    assert len(pkt.body) == 32
    assert crc_ok(pkt.body)
    assert Packet.from_bytes(pkt.to_bytes(), body_len=32) == pkt


def test_default_body_length():
    pkt = frame_packet(Node.A, Node.R, 0, os.urandom(DEFAULT_BODY_LEN - 4))
    assert len(pkt.body) == DEFAULT_BODY_LEN
    assert len(pkt.to_bytes()) == 6 + DEFAULT_BODY_LEN
    assert pkt.to_bytes()[:6] == bytes([1, 3, 0, 0, 0, 0])


@pytest.mark.parametrize("n", [0, DEFAULT_BODY_LEN - 5, DEFAULT_BODY_LEN - 3, DEFAULT_BODY_LEN])
def test_wrong_payload_length_rejected(n):
    with pytest.raises(PacketError):
        frame_packet(Node.A, Node.R, 0, bytes(n))


def test_generation_out_of_range_rejected():
    with pytest.raises(PacketError):
        frame_packet(Node.A, Node.R, 4, bytes(12), body_len=16, bits=2)


def test_corrupted_body_fails_crc():
    body = bytearray(seal(b"hello world"))
    body[3] ^= 0x10
    assert not crc_ok(bytes(body))
    assert not crc_ok(b"abc")

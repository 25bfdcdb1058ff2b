"""Packets, CRC framing, XOR combining and generation-counter arithmetic.

Every packet in a scenario carries a body of the same length ``L`` bytes: the
payload (``L - 4`` bytes) followed by a big-endian CRC-32 of the payload. The
relay XORs whole bodies; the generation ID travels in a cleartext header.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from enum import IntEnum

CRC_BYTES = 4
DEFAULT_BODY_LEN = 1024
GENERATION_BITS = 32

_HEADER = struct.Struct(">BBI")


class Node(IntEnum):
    """Node identifiers of the three-node topology; values are the wire codes."""

    A = 1
    B = 2
    R = 3
    BROADCAST = 0xFF

    @property
    def label(self) -> str:
        return self.name if self is not Node.BROADCAST else "*"


SOURCES = (Node.A, Node.B)


def other_source(node: Node) -> Node:
    if node is Node.A:
        return Node.B
    if node is Node.B:
        return Node.A
    raise ValueError(f"{node!r} is not a source/sink node")


class PacketError(ValueError):
    """Raised for malformed packets or mismatched bodies."""


@dataclass(frozen=True)
class Packet:
    src: Node
    dst: Node
    generation: int
    body: bytes

    @property
    def payload(self) -> bytes:
        return self.body[:-CRC_BYTES]

    def to_bytes(self) -> bytes:
        """Trace wire layout: src(1) dst(1) generation(4, big-endian) body(L)."""
        return _HEADER.pack(int(self.src), int(self.dst), self.generation) + self.body

    @classmethod
    def from_bytes(cls, raw: bytes, body_len: int = DEFAULT_BODY_LEN) -> Packet:
        if len(raw) != _HEADER.size + body_len:
            raise PacketError(
                f"expected {_HEADER.size + body_len} bytes, got {len(raw)}"
            )
        src, dst, gen = _HEADER.unpack_from(raw)
        return cls(Node(src), Node(dst), gen, bytes(raw[_HEADER.size:]))


def xor_combine(a: bytes, b: bytes) -> bytes:
    """Bitwise XOR of two equal-length byte strings."""
    if len(a) != len(b):
        raise PacketError(f"length mismatch: {len(a)} != {len(b)}")
    n = len(a)
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(n, "big")


def next_generation(g: int, bits: int = GENERATION_BITS) -> int:
    return (g + 1) % (1 << bits)


def compute_crc(payload: bytes) -> int:
    """CRC-32/IEEE (802.3 polynomial, reflected, init and xorout 0xFFFFFFFF)."""
    return zlib.crc32(payload) & 0xFFFFFFFF


def seal(payload: bytes) -> bytes:
    """Append the CRC field to ``payload``."""
    return bytes(payload) + compute_crc(payload).to_bytes(CRC_BYTES, "big")


def crc_ok(body: bytes) -> bool:
    if len(body) < CRC_BYTES:
        return False
    return compute_crc(body[:-CRC_BYTES]) == int.from_bytes(body[-CRC_BYTES:], "big")


def frame_packet(
    src: Node,
    dst: Node,
    generation: int,
    payload: bytes,
    body_len: int = DEFAULT_BODY_LEN,
    bits: int = GENERATION_BITS,
) -> Packet:
    if len(payload) != body_len - CRC_BYTES:
        raise PacketError(
            f"payload must be {body_len - CRC_BYTES} bytes, got {len(payload)}"
        )
    if not 0 <= generation < (1 << bits):
        raise PacketError(f"generation {generation} outside {bits}-bit range")
    return Packet(Node(src), Node(dst), generation, seal(payload))


def parse_packet(pkt: Packet) -> tuple[Node, Node, int, bytes]:
    """Return ``(src, dst, generation, payload)``; does not check the CRC."""
    return pkt.src, pkt.dst, pkt.generation, pkt.payload

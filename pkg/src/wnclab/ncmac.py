"""Network-coding shim between the MAC and the link layer.

Source/sink nodes stamp each outgoing packet with a generation ID and keep a
copy in a bounded buffer. The relay keeps one bounded queue per source and
XORs two packets only when their generation IDs are equal. State objects are
owned by a single event loop and advanced in place; the module-level functions
mirror the methods and return ``(result, state)`` for convenience.
"""

from __future__ import annotations

import json
from collections import OrderedDict, deque
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Literal

from .core import (
    CRC_BYTES,
    DEFAULT_BODY_LEN,
    GENERATION_BITS,
    Node,
    Packet,
    crc_ok,
    frame_packet,
    next_generation,
    other_source,
    xor_combine,
)

DEFAULT_QUEUE_SIZE = 16

DeliverKind = Literal["decoded", "passthrough", "dropped"]
RelayKind = Literal["coded", "enqueued", "evict_uncoded", "forward"]


@dataclass(frozen=True)
class DeliverResult:
    kind: DeliverKind
    generation: int
    payload: bytes | None = None
    origin: Node | None = None
    reason: str | None = None

    @property
    def delivered(self) -> bool:
        return self.kind != "dropped"


@dataclass(frozen=True)
class RelayAction:
    """Outcome of one relay reception.

    ``packet`` is what was handed to the sending buffer (coded packet, the
    evicted uncoded packet, or the forwarded packet); ``overwritten`` is a
    sending-buffer entry lost to overflow, ``replaced`` a same-generation
    queue entry that was rewritten.
    """

    kind: RelayKind
    generation: int
    packet: Packet | None = None
    consumed_generations: tuple[int, int] | None = None
    overwritten: Packet | None = None
    replaced: Packet | None = None


@dataclass
class EndpointState:
    node: Node
    buffer_size: int = DEFAULT_QUEUE_SIZE
    body_len: int = DEFAULT_BODY_LEN
    counter_bits: int = GENERATION_BITS
    gen_counter: int = 0
    own_buffer: OrderedDict[int, Packet] = field(default_factory=OrderedDict)

    def __post_init__(self) -> None:
        self.node = Node(self.node)
        if self.node not in (Node.A, Node.B):
            raise ValueError("endpoints must be node A or B")
        if self.buffer_size < 1:
            raise ValueError("buffer_size must be >= 1")

    def on_transmit(self, payload: bytes) -> Packet:
        """Stamp, store a copy (oldest overwritten when full), advance the counter."""
        pkt = frame_packet(
            self.node, Node.R, self.gen_counter, payload, self.body_len, self.counter_bits
        )
        buf = self.own_buffer
        if pkt.generation in buf:
            # only reachable after counter wraparound
            del buf[pkt.generation]
        elif len(buf) >= self.buffer_size:
            buf.popitem(last=False)
        buf[pkt.generation] = pkt
        self.gen_counter = next_generation(self.gen_counter, self.counter_bits)
        return pkt

    def on_receive(self, pkt: Packet) -> DeliverResult:
        gen = pkt.generation
        if pkt.src == self.node:
            return DeliverResult("dropped", gen, reason="own")
        own = self.own_buffer.get(gen)
        if own is not None:
            body = xor_combine(own.body, pkt.body)
            if crc_ok(body):
                return DeliverResult(
                    "decoded", gen, body[:-CRC_BYTES], origin=other_source(self.node)
                )
            return DeliverResult("dropped", gen, reason="crc")
        # no coded flag on the wire: CRC screening alone rejects coded bodies
        if crc_ok(pkt.body):
            return DeliverResult(
                "passthrough", gen, pkt.payload, origin=other_source(self.node)
            )
        return DeliverResult("dropped", gen, reason="crc")


def find_proper(queue: OrderedDict[int, Packet], generation: int) -> Packet | None:
    return queue.get(generation)


@dataclass
class RelayState:
    queue_size: int = DEFAULT_QUEUE_SIZE
    send_buffer_size: int = DEFAULT_QUEUE_SIZE
    queue_A: OrderedDict[int, Packet] = field(default_factory=OrderedDict)
    queue_B: OrderedDict[int, Packet] = field(default_factory=OrderedDict)
    sending_buffer: deque[Packet] = field(default_factory=deque)

    def __post_init__(self) -> None:
        if self.queue_size < 1 or self.send_buffer_size < 1:
            raise ValueError("queue sizes must be >= 1")

    def queue_for(self, node: Node) -> OrderedDict[int, Packet]:
        if node is Node.A:
            return self.queue_A
        if node is Node.B:
            return self.queue_B
        raise ValueError(f"relay only accepts packets from A or B, got {node!r}")

    def _push(self, pkt: Packet) -> Packet | None:
        lost = None
        if len(self.sending_buffer) >= self.send_buffer_size:
            lost = self.sending_buffer.popleft()
        self.sending_buffer.append(pkt)
        return lost

    def on_receive(self, pkt: Packet) -> RelayAction:
        own = self.queue_for(pkt.src)
        opp = self.queue_for(other_source(pkt.src))
        gen = pkt.generation

        match = find_proper(opp, gen)
        if match is not None:
            del opp[gen]
            own.pop(gen, None)
            coded = Packet(Node.R, Node.BROADCAST, gen, xor_combine(pkt.body, match.body))
            lost = self._push(coded)
            return RelayAction("coded", gen, coded, (gen, gen), overwritten=lost)

        if gen in own:
            replaced = own.pop(gen)
            own[gen] = pkt
            return RelayAction("enqueued", gen, replaced=replaced)
        if len(own) < self.queue_size:
            own[gen] = pkt
            return RelayAction("enqueued", gen)

        _, oldest = own.popitem(last=False)
        own[gen] = pkt
        uncoded = Packet(oldest.src, Node.BROADCAST, oldest.generation, oldest.body)
        lost = self._push(uncoded)
        return RelayAction("evict_uncoded", oldest.generation, uncoded, overwritten=lost)

    def forward(self, pkt: Packet) -> RelayAction:
        """Plain store-and-forward used when network coding is disabled."""
        out = Packet(pkt.src, Node.BROADCAST, pkt.generation, pkt.body)
        lost = self._push(out)
        return RelayAction("forward", pkt.generation, out, overwritten=lost)

    def next_to_send(self) -> Packet | None:
        return self.sending_buffer.popleft() if self.sending_buffer else None


def source_on_transmit(state: EndpointState, payload: bytes) -> tuple[Packet, EndpointState]:
    return state.on_transmit(payload), state


def sink_on_receive(state: EndpointState, pkt: Packet) -> tuple[DeliverResult, EndpointState]:
    return state.on_receive(pkt), state


def relay_on_receive(state: RelayState, pkt: Packet) -> tuple[RelayAction, RelayState]:
    return state.on_receive(pkt), state


# -- trace export ------------------------------------------------------------

def action_record(t_us: int, node: Node, kind: str, generation: int | None, **extra) -> dict:
    rec = {"t": int(t_us), "node": Node(node).label, "kind": kind, "gen": generation}
    rec.update(extra)
    return rec


def dump_jsonl(records: Iterable[dict], fp: IO[str]) -> None:
    for rec in records:
        fp.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
        fp.write("\n")


def load_jsonl(fp: IO[str]) -> Iterator[dict]:
    for line in fp:
        line = line.strip()
        if line:
            yield json.loads(line)

"""Discrete-event simulation of the A - R - B relay network.

All three nodes hear each other (no hidden terminals), so any temporal
overlap of two transmissions destroys both. Source uplinks are unicast to the
relay and acknowledged (modelled as SIFS + ACK airtime appended to the frame,
with the success/failure outcome fed back to the sender's DCF); relay
transmissions are unacknowledged broadcasts.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..core import Node, Packet, crc_ok, other_source
from ..ncmac import EndpointState, RelayState, action_record
from .config import MacConfig
from .dcf import DcfState, EventKind, Phase, SimEvent, dcf_step
from .links import link_deliver
from .tdma import tdma_next

NODES = (Node.A, Node.B, Node.R)


@dataclass
class _Tx:
    start: int
    end: int
    collided: bool = False


@dataclass
class _Frame:
    pkt: Packet | None
    t0: int
    payload: bytes | None = None
    seq: int | None = None


@dataclass(frozen=True)
class _Origin:
    src: Node
    seq: int
    t0: int


class MacSimulator:
    """One scenario run. Call :meth:`run` once; it returns the trace records."""

    def __init__(self, cfg: MacConfig):
        self.cfg = cfg
        ss = np.random.SeedSequence(cfg.seed)
        self.rng_mac, self.rng_link, self.rng_app = (np.random.default_rng(s) for s in ss.spawn(3))
        self.links = cfg.link_model()
        q, buf, sbuf = cfg.buffers
        self.relay = RelayState(queue_size=q, send_buffer_size=sbuf)
        self.endpoints = {
            n: EndpointState(n, buffer_size=buf, body_len=cfg.packet_bytes, counter_bits=cfg.counter_bits)
            for n in (Node.A, Node.B)
        }
        base = cfg.dcf_params()
        self.params = {
            Node.A: base,
            Node.B: base,
            Node.R: base.priority() if cfg.relay_access == "pifs" else base,
        }
        self.dcf = {n: DcfState.initial(n, self.params[n]) for n in NODES}
        self.frame: dict[Node, _Frame | None] = {n: None for n in NODES}
        self.app_queue: dict[Node, deque[tuple[int, bytes]]] = {n: deque() for n in (Node.A, Node.B)}
        self.active: dict[Node, _Tx] = {}
        self.truth: dict[bytes, _Origin] = {}
        self.delivered: set[tuple[Node, bytes]] = set()
        self.seq = {Node.A: 0, Node.B: 0}
        self.trace: list[dict] = []
        self._heap: list = []
        self._tick = itertools.count()
        self._ran = False

    # -- plumbing ----------------------------------------------------------

    def _schedule(self, ev: SimEvent) -> None:
        heapq.heappush(self._heap, (*ev.sort_key(), next(self._tick), ev))

    def _log(self, t: int, node: Node, kind: str, gen: int | None = None, **extra) -> None:
        self.trace.append(action_record(t, node, kind, gen, **extra))

    def _step_dcf(self, node: Node, ev: SimEvent) -> None:
        state, emitted = dcf_step(self.dcf[node], ev, bool(self.active), self.params[node], self.rng_mac)
        self.dcf[node] = state
        for out in emitted:
            self._schedule(out)

    @property
    def _csma(self) -> bool:
        return self.cfg.access == "csma"

    # -- traffic -----------------------------------------------------------

    def _new_source_frame(self, node: Node, now: int) -> _Frame | None:
        if self.cfg.traffic == "saturated":
            t0 = now
            payload = self.rng_app.bytes(self.cfg.packet_bytes - 4)
        else:
            if not self.app_queue[node]:
                return None
            t0, payload = self.app_queue[node].popleft()
        seq = self.seq[node]
        self.seq[node] += 1
        self.truth[payload] = _Origin(node, seq, t0)
        return _Frame(None, t0, payload, seq)

    def _stamp(self, node: Node, frame: _Frame, now: int) -> None:
        # the shim stamps and buffers a copy when the frame first goes on air
        frame.pkt = self.endpoints[node].on_transmit(frame.payload)
        self._log(frame.t0, node, "origin", frame.pkt.generation, seq=frame.seq, sent=now)

    def _feed(self, node: Node, now: int) -> None:
        """Hand the MAC its next frame if it is free."""
        if self.frame[node] is not None:
            return
        if node is Node.R:
            pkt = self.relay.next_to_send()
            item = _Frame(pkt, now) if pkt is not None else None
        else:
            item = self._new_source_frame(node, now)
        if item is None:
            return
        self.frame[node] = item
        if self._csma:
            self._step_dcf(node, SimEvent(now, EventKind.APP_ARRIVAL, node))

    # -- reception ---------------------------------------------------------

    def _relay_receive(self, pkt: Packet, now: int) -> None:
        if self.cfg.nc:
            action = self.relay.on_receive(pkt)
        else:
            action = self.relay.forward(pkt)
        extra = {"src": pkt.src.label}
        if action.kind == "evict_uncoded":
            extra["evicted_src"] = action.packet.src.label
            extra["arrived_gen"] = pkt.generation
        self._log(now, Node.R, action.kind, action.generation, **extra)
        if action.replaced is not None:
            self._log(now, Node.R, "rewrite", action.replaced.generation, src=action.replaced.src.label)
        if action.overwritten is not None:
            self._log(now, Node.R, "overflow", action.overwritten.generation, src=action.overwritten.src.label)

    def _sink_receive(self, sink: Node, pkt: Packet, now: int) -> None:
        if self.cfg.nc:
            res = self.endpoints[sink].on_receive(pkt)
            kind, payload, origin, reason = res.kind, res.payload, res.origin, res.reason
        elif pkt.src == other_source(sink) and crc_ok(pkt.body):
            kind, payload, origin, reason = "passthrough", pkt.payload, pkt.src, None
        else:
            kind, payload, origin, reason = "dropped", None, None, "own" if pkt.src == sink else "crc"

        if kind == "dropped":
            self._log(now, sink, "drop", pkt.generation, reason=reason)
            return
        info = self.truth.get(payload)
        if info is None or info.src != origin or info.src == sink:
            self._log(now, sink, "misdecode", pkt.generation)
            return
        key = (sink, payload)
        if key in self.delivered:
            self._log(now, sink, "duplicate", pkt.generation, src=info.src.label)
            return
        self.delivered.add(key)
        self._log(now, sink, "deliver", pkt.generation, src=info.src.label, seq=info.seq, t0=info.t0, mode=kind)

    # -- transmissions -----------------------------------------------------

    def _start_tx(self, node: Node, now: int) -> None:
        frame = self.frame[node]
        if frame.pkt is None:
            self._stamp(node, frame, now)
        dur = self.cfg.frame_us
        if self._csma and node is not Node.R:
            dur += self.cfg.sifs_us + self.cfg.ack_us
        tx = _Tx(now, now + dur)
        if self.active:
            tx.collided = True
            for other in self.active.values():
                other.collided = True
        self.active[node] = tx
        self._schedule(SimEvent(tx.end, EventKind.TX_END, node))

    def _end_tx(self, node: Node, now: int) -> str:
        tx = self.active.pop(node)
        pkt = self.frame[node].pkt
        if node is Node.R:
            for sink in (Node.A, Node.B):
                if tx.collided:
                    continue
                if link_deliver(pkt, Node.R, sink, self.links, self.rng_link) == "delivered":
                    self._sink_receive(sink, pkt, now)
            self._log(tx.start, node, "tx", pkt.generation, result="collision" if tx.collided else "broadcast",
                      src=pkt.src.label)
            return "broadcast"
        if tx.collided:
            result = "collision"
        else:
            result = "ok" if link_deliver(pkt, node, Node.R, self.links, self.rng_link) == "delivered" else "lost"
        self._log(tx.start, node, "tx", pkt.generation, result=result)
        if result == "ok":
            self._relay_receive(pkt, now)
            return "ok"
        return "fail"

    # -- event handlers ----------------------------------------------------

    def _on_tx_end_csma(self, ev: SimEvent) -> None:
        node, now = ev.node, ev.time
        outcome = self._end_tx(node, now)
        self._step_dcf(node, SimEvent(now, EventKind.TX_END, node, info=outcome))
        if self.dcf[node].phase is Phase.IDLE:
            pkt = self.frame[node].pkt
            if self.dcf[node].dropped:
                self._log(now, node, "mac_drop", pkt.generation)
            self.frame[node] = None
        if not self.active:
            for other in NODES:
                if other is not node:
                    self._step_dcf(other, SimEvent(now, EventKind.TX_END, node))
        for n in NODES:
            self._feed(n, now)

    def _on_tx_end_tdma(self, ev: SimEvent) -> None:
        node, now = ev.node, ev.time
        self._end_tx(node, now)
        self.frame[node] = None
        if node is not Node.R:
            self._feed(node, now)

    def _on_slot(self, ev: SimEvent) -> None:
        k, now = ev.info, ev.time
        owner = tdma_next(k, "3-step" if self.cfg.nc else "4-step")
        self._feed(owner, now)
        if self.frame[owner] is not None:
            self._start_tx(owner, now)
        slot_us = self.cfg.frame_us + self.cfg.guard_us
        self._schedule(SimEvent(now + slot_us, EventKind.SLOT_BOUNDARY, Node.R, info=k + 1))

    def _on_arrival(self, ev: SimEvent) -> None:
        node, now = ev.node, ev.time
        self.app_queue[node].append((now, self.rng_app.bytes(self.cfg.packet_bytes - 4)))
        gap = max(1, int(round(self.rng_app.exponential(1e6 / self.cfg.arrival_rate_pps))))
        self._schedule(SimEvent(now + gap, EventKind.APP_ARRIVAL, node))
        if self._csma:
            self._feed(node, now)

    def run(self) -> list[dict]:
        if self._ran:
            raise RuntimeError("a MacSimulator instance runs once")
        self._ran = True
        cfg = self.cfg
        self.trace.append({
            "kind": "config",
            "t": 0,
            "node": None,
            "gen": None,
            "duration_us": cfg.duration_us,
            "frame_us": cfg.frame_us,
            "config": cfg.to_dict(),
        })
        if cfg.traffic == "poisson":
            for n in (Node.A, Node.B):
                self._schedule(SimEvent(0, EventKind.APP_ARRIVAL, n))
        if self._csma:
            for n in (Node.A, Node.B):
                self._feed(n, 0)
        else:
            for n in (Node.A, Node.B):
                self._feed(n, 0)
            self._schedule(SimEvent(0, EventKind.SLOT_BOUNDARY, Node.R, info=0))

        end = cfg.duration_us
        heap = self._heap
        while heap:
            ev: SimEvent = heap[0][-1]
            if ev.time > end:
                break
            heapq.heappop(heap)
            kind = ev.kind
            if kind is EventKind.TX_END:
                (self._on_tx_end_csma if self._csma else self._on_tx_end_tdma)(ev)
            elif kind is EventKind.BACKOFF_EXPIRE:
                self._step_dcf(ev.node, ev)
            elif kind is EventKind.TX_START:
                self._start_tx(ev.node, ev.time)
                for other in NODES:
                    if other is not ev.node:
                        self._step_dcf(other, ev)
            elif kind is EventKind.SLOT_BOUNDARY:
                self._on_slot(ev)
            elif kind is EventKind.APP_ARRIVAL:
                self._on_arrival(ev)
        return self.trace


def simulate(cfg: MacConfig) -> list[dict]:
    return MacSimulator(cfg).run()

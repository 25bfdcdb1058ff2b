"""Throughput, delay and loss from a simulation trace."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

SOURCES = ("A", "B")
OTHER = {"A": "B", "B": "A"}


@dataclass
class NodeMetrics:
    throughput: float          # packets/s delivered *to* this node
    loss_rate: float           # fraction of this node's packets never delivered
    uplink_loss: float         # failed uplink attempts / attempts (node -> R)
    avg_delay: float           # s, this node's packets to the opposite sink
    originated: int
    delivered: int
    decoded: int
    passthrough: int


@dataclass
class MacMetrics:
    throughput: float          # packets/s/node, mean over A and B
    avg_delay: float           # s
    avg_delay_norm: float      # in units of one packet airtime
    loss_rate: float
    per_node: dict[str, NodeMetrics] = field(default_factory=dict)
    window_s: float = 0.0
    misdecodes: int = 0
    coded_broadcasts: int = 0
    uncoded_broadcasts: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def collect_metrics(trace: list[dict], warmup: float = 0.1, *, tail: float | None = None) -> MacMetrics:
    """Steady-state metrics over ``[warmup * T, T]``.

    Throughput counts deliveries inside the window. Loss and delay are
    computed over packets that originated in ``[warmup * T, (1 - tail) * T]``
    (``tail`` defaults to ``warmup``) so that packets still in flight when the
    run stops are not counted as lost.
    """
    header = next((r for r in trace if r.get("kind") == "config"), None)
    if header is None:
        raise ValueError("trace has no config header")
    duration = header["duration_us"]
    frame_us = header["frame_us"]
    tail = warmup if tail is None else tail
    t_lo = warmup * duration
    t_hi = duration
    o_hi = (1.0 - tail) * duration
    if t_hi - t_lo <= 0 or o_hi <= t_lo:
        raise ValueError("empty steady-state window")
    window_s = (t_hi - t_lo) / 1e6

    recv = {n: 0 for n in SOURCES}
    modes = {n: {"decoded": 0, "passthrough": 0} for n in SOURCES}
    originated = {n: set() for n in SOURCES}
    delivered_delay: dict[str, dict[int, float]] = {n: {} for n in SOURCES}
    attempts = {n: 0 for n in SOURCES}
    failures = {n: 0 for n in SOURCES}
    misdecodes = coded = uncoded = 0

    for r in trace:
        kind = r["kind"]
        t = r["t"]
        if kind == "origin":
            if t_lo <= t < o_hi:
                originated[r["node"]].add(r["seq"])
        elif kind == "deliver":
            src = r["src"]
            if t_lo <= t <= t_hi:
                recv[r["node"]] += 1
                modes[r["node"]]["passthrough" if r["mode"] == "passthrough" else "decoded"] += 1
            delivered_delay[src][r["seq"]] = (t - r["t0"]) / 1e6
        elif kind == "tx" and r["node"] in SOURCES and t_lo <= t <= t_hi:
            attempts[r["node"]] += 1
            if r["result"] != "ok":
                failures[r["node"]] += 1
        elif kind == "misdecode":
            misdecodes += 1
        elif kind == "coded" and t_lo <= t <= t_hi:
            coded += 1
        elif kind in ("evict_uncoded", "forward") and t_lo <= t <= t_hi:
            uncoded += 1

    per_node = {}
    all_delays: list[float] = []
    total_orig = total_deliv = 0
    for n in SOURCES:
        seqs = originated[n]
        delays = [delivered_delay[n][s] for s in seqs if s in delivered_delay[n]]
        all_delays.extend(delays)
        total_orig += len(seqs)
        total_deliv += len(delays)
        per_node[n] = NodeMetrics(
            throughput=recv[n] / window_s,
            loss_rate=1.0 - len(delays) / len(seqs) if seqs else 0.0,
            uplink_loss=failures[n] / attempts[n] if attempts[n] else 0.0,
            avg_delay=float(np.mean(delays)) if delays else float("nan"),
            originated=len(seqs),
            delivered=len(delays),
            decoded=modes[n]["decoded"],
            passthrough=modes[n]["passthrough"],
        )
    if total_orig == 0:
        raise ValueError("no packets originated inside the steady-state window")
    avg_delay = float(np.mean(all_delays)) if all_delays else float("nan")
    return MacMetrics(
        throughput=float(np.mean([per_node[n].throughput for n in SOURCES])),
        avg_delay=avg_delay,
        avg_delay_norm=avg_delay * 1e6 / frame_us,
        loss_rate=1.0 - total_deliv / total_orig,
        per_node=per_node,
        window_s=window_s,
        misdecodes=misdecodes,
        coded_broadcasts=coded,
        uncoded_broadcasts=uncoded,
    )

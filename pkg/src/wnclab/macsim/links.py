"""Abstract lossy links between the three nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from ..core import Node


def bpsk_ber(snr_linear: float) -> float:
    """Uncoded BPSK bit error rate over AWGN at Eb/N0 = ``snr_linear``."""
    return 0.5 * float(erfc(math.sqrt(max(snr_linear, 0.0))))


def power_loss(power: float, operating_snr_db: float, frame_bits: int) -> float:
    """Frame loss ``1 - (1 - BER)^bits`` at an SNR proportional to ``power``."""
    if power <= 0:
        return 1.0
    snr = power * 10.0 ** (operating_snr_db / 10.0)
    ber = bpsk_ber(snr)
    return float(-math.expm1(frame_bits * math.log1p(-ber))) if ber < 1 else 1.0


@dataclass
class LinkModel:
    """Per-link erasure probabilities plus an optional power-to-loss mapping.

    ``per_link_loss`` maps ``(src, dst)`` to a base loss probability. When
    ``operating_snr_db`` is set, a frame from ``src`` is additionally lost with
    :func:`power_loss` evaluated at ``tx_power[src]``; the two causes combine
    independently.
    """

    per_link_loss: dict[tuple[Node, Node], float] = field(default_factory=dict)
    tx_power: dict[Node, float] = field(default_factory=dict)
    operating_snr_db: float | None = None
    frame_bits: int = 8 * 1024

    def __post_init__(self) -> None:
        for key, p in self.per_link_loss.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"loss probability for {key} outside [0, 1]: {p}")
        for node, p in self.tx_power.items():
            if p < 0:
                raise ValueError(f"negative transmit power for {node}")
        self._cache: dict[tuple[Node, Node], float] = {}

    def loss_probability(self, src: Node, dst: Node) -> float:
        key = (src, dst)
        p = self._cache.get(key)
        if p is None:
            base = self.per_link_loss.get(key, 0.0)
            extra = 0.0
            if self.operating_snr_db is not None:
                extra = power_loss(self.tx_power.get(src, 1.0), self.operating_snr_db, self.frame_bits)
            p = 1.0 - (1.0 - base) * (1.0 - extra)
            self._cache[key] = p
        return p


def link_deliver(pkt, src: Node, dst: Node, link_model: LinkModel, rng: np.random.Generator) -> str:
    """``"delivered"`` or ``"lost"``; always consumes exactly one uniform draw."""
    u = rng.random()
    return "lost" if u < link_model.loss_probability(src, dst) else "delivered"

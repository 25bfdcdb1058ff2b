"""Per-station CSMA/CA (DCF) state machine.

The station senses the medium, waits its inter-frame space, counts down a
random backoff in slot units (frozen while the medium is busy) and then
transmits. Unicast failures double the contention window up to ``cw_max``;
success or a retry-limit drop resets it. Times are integer microseconds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum

import numpy as np

from ..core import Node


class Phase(Enum):
    IDLE = "idle"
    SENSING = "sensing"
    BACKOFF = "backoff"
    TRANSMITTING = "transmitting"


class EventKind(IntEnum):
    """Event kinds; the integer value is the tie-break order at equal times."""

    TX_END = 0
    RX_DELIVER = 1
    APP_ARRIVAL = 2
    BACKOFF_EXPIRE = 3
    TX_START = 4
    SLOT_BOUNDARY = 5


@dataclass(frozen=True)
class SimEvent:
    time: int
    kind: EventKind
    node: Node
    payload: object = None
    info: object = None

    def sort_key(self) -> tuple[int, int, int]:
        return (self.time, int(self.kind), int(self.node))


@dataclass(frozen=True)
class DcfParams:
    """802.11a OFDM timing by default. ``ifs_us`` overrides DIFS for one station."""

    slot_us: int = 9
    sifs_us: int = 16
    difs_us: int = 34
    cw_min: int = 15
    cw_max: int = 1023
    retry_limit: int = 7
    ifs_us: int | None = None

    def __post_init__(self) -> None:
        if self.slot_us <= 0 or self.sifs_us < 0 or self.difs_us < 0:
            raise ValueError("DCF timings must be positive")
        if not 0 <= self.cw_min <= self.cw_max:
            raise ValueError("need 0 <= cw_min <= cw_max")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be >= 0")

    @property
    def pifs_us(self) -> int:
        return self.sifs_us + self.slot_us

    @property
    def ifs(self) -> int:
        return self.difs_us if self.ifs_us is None else self.ifs_us

    def priority(self) -> DcfParams:
        """PIFS access without backoff: always wins against DIFS contenders."""
        return replace(self, ifs_us=self.pifs_us, cw_min=0, cw_max=0)


@dataclass(frozen=True)
class DcfState:
    node: Node
    phase: Phase = Phase.IDLE
    backoff_slots_remaining: int = 0
    contention_window: int = 15
    retries: int = 0
    countdown_from: int | None = None
    expires_at: int | None = None
    dropped: bool = False

    @classmethod
    def initial(cls, node: Node, params: DcfParams) -> DcfState:
        return cls(node=node, contention_window=params.cw_min)


def _countdown(state: DcfState, now: int, params: DcfParams) -> tuple[DcfState, list[SimEvent]]:
    start = now + params.ifs
    expires = start + state.backoff_slots_remaining * params.slot_us
    new = replace(state, phase=Phase.BACKOFF, countdown_from=start, expires_at=expires)
    return new, [SimEvent(expires, EventKind.BACKOFF_EXPIRE, state.node)]


def _draw(rng: np.random.Generator, cw: int) -> int:
    return int(rng.integers(0, cw + 1)) if cw > 0 else 0


def dcf_step(
    state: DcfState,
    event: SimEvent,
    medium_busy: bool,
    params: DcfParams,
    rng: np.random.Generator,
) -> tuple[DcfState, list[SimEvent]]:
    """Advance one station on ``event``.

    Own events (``event.node == state.node``): APP_ARRIVAL hands the MAC a
    frame, BACKOFF_EXPIRE starts a transmission (emits TX_START), TX_END
    carries the outcome in ``event.info`` (``"ok"``, ``"fail"`` or
    ``"broadcast"``). Other stations' TX_START freezes the backoff; their
    TX_END resumes it once ``medium_busy`` is false. Stale BACKOFF_EXPIRE
    events (cancelled by a freeze) are ignored.
    """
    now = event.time
    own = event.node == state.node
    kind = event.kind

    if own and kind is EventKind.APP_ARRIVAL:
        if state.phase is not Phase.IDLE:
            raise RuntimeError(f"{state.node.label}: frame arrived while {state.phase.value}")
        state = replace(state, dropped=False)
        if medium_busy:
            return replace(state, phase=Phase.SENSING), []
        return _countdown(state, now, params)

    if own and kind is EventKind.BACKOFF_EXPIRE:
        if state.phase is not Phase.BACKOFF or state.expires_at != now:
            return state, []
        new = replace(
            state,
            phase=Phase.TRANSMITTING,
            backoff_slots_remaining=0,
            countdown_from=None,
            expires_at=None,
        )
        return new, [SimEvent(now, EventKind.TX_START, state.node)]

    if own and kind is EventKind.TX_END:
        outcome = event.info
        if outcome == "fail" and state.retries < params.retry_limit:
            cw = min(2 * state.contention_window + 1, params.cw_max)
            new = replace(
                state,
                retries=state.retries + 1,
                contention_window=cw,
                backoff_slots_remaining=_draw(rng, cw),
            )
            if medium_busy:
                return replace(new, phase=Phase.SENSING), []
            return _countdown(new, now, params)
        # success, broadcast, or retry limit exhausted: frame leaves the MAC
        cw = params.cw_min
        new = DcfState(
            node=state.node,
            phase=Phase.IDLE,
            backoff_slots_remaining=_draw(rng, cw),
            contention_window=cw,
            dropped=(outcome == "fail"),
        )
        return new, []

    if not own and kind is EventKind.TX_START:
        if state.phase is Phase.BACKOFF:
            elapsed = now - state.countdown_from
            slots = state.backoff_slots_remaining
            if elapsed > 0:
                slots = max(0, slots - elapsed // params.slot_us)
            return (
                replace(
                    state,
                    phase=Phase.SENSING,
                    backoff_slots_remaining=slots,
                    countdown_from=None,
                    expires_at=None,
                ),
                [],
            )
        return state, []

    if not own and kind is EventKind.TX_END:
        if state.phase is Phase.SENSING and not medium_busy:
            return _countdown(state, now, params)
        return state, []

    return state, []

"""Fixed TDMA schedules for the two-way relay exchange."""

from __future__ import annotations

from ..core import Node

SCHEDULES: dict[str, tuple[Node, ...]] = {
    # A -> R, B -> R, R broadcasts the XOR
    "3-step": (Node.A, Node.B, Node.R),
    # A -> R, R -> B, B -> R, R -> A
    "4-step": (Node.A, Node.R, Node.B, Node.R),
}


def tdma_next(slot_index: int, mode: str = "3-step") -> Node:
    """Node that owns ``slot_index`` under the given exchange mode."""
    try:
        cycle = SCHEDULES[mode]
    except KeyError:
        raise ValueError(f"unknown TDMA mode {mode!r}; expected one of {sorted(SCHEDULES)}") from None
    if slot_index < 0:
        raise ValueError("slot_index must be non-negative")
    return cycle[slot_index % len(cycle)]

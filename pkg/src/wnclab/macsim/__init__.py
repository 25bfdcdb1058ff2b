"""Discrete-event MAC simulator (CSMA/CA or TDMA) for the two-way relay network."""

from .config import ConfigError, MacConfig
from .dcf import DcfParams, DcfState, EventKind, Phase, SimEvent, dcf_step
from .engine import MacSimulator, simulate
from .links import LinkModel, link_deliver, power_loss
from .metrics import MacMetrics, NodeMetrics, collect_metrics
from .tdma import tdma_next


def run_scenario(config: MacConfig) -> MacMetrics:
    """Simulate ``config`` and return steady-state metrics."""
    return collect_metrics(simulate(config), config.warmup)


__all__ = [
    "ConfigError",
    "DcfParams",
    "DcfState",
    "EventKind",
    "LinkModel",
    "MacConfig",
    "MacMetrics",
    "MacSimulator",
    "NodeMetrics",
    "Phase",
    "SimEvent",
    "collect_metrics",
    "dcf_step",
    "link_deliver",
    "power_loss",
    "run_scenario",
    "simulate",
    "tdma_next",
]

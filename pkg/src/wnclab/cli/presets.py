"""Named experiment presets. Each one is a partial scenario tree."""

from __future__ import annotations

PRESETS: dict[str, dict] = {
    "fig_throughput": {
        "description": "CSMA/CA queue-size sweep with and without network coding: throughput, delay, loss",
        "command": "mac-sim",
        "tree": {
            "mac": {"access": "csma"},
            "sim": {"duration_s": 30.0, "repetitions": 10},
            "sweep": {"nc.queue_size": [1, 2, 4, 8, 16, 32], "nc.enabled": [True, False]},
        },
    },
    "fig_asym": {
        "description": "Node B transmit power halved step by step: per-node loss and throughput",
        "command": "mac-sim",
        "tree": {
            "mac": {"access": "csma"},
            "links": {"operating_snr_db": 12.0},
            "sim": {"duration_s": 30.0, "repetitions": 10},
            "sweep": {"links.power.B": [1.0, 0.5, 0.25, 0.125]},
        },
    },
    "fig_phy_throughput": {
        "description": "Per-flow PHY throughput versus SNR for joint modulation (optimal, Gray) and plain forwarding",
        "command": "phy-sim",
        "tree": {
            "phy": {"n_exchanges": 3},
            "sweep": {
                "phy.traffic": ["symmetric", "asymmetric"],
                "phy.scheme": ["3-step:optimal", "3-step:gray", "4-step"],
                "phy.snr_db": [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0],
            },
        },
    },
    "fig_constellation": {
        "description": "Equalised QPSK data cells of one frame at 16 dB SNR (I/Q dump)",
        "command": "phy-sim",
        "tree": {"phy": {"task": "constellation", "snr_db": 16.0}},
    },
}


def get(name: str) -> dict:
    from ..macsim.config import ConfigError

    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None

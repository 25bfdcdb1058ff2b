"""Scenario configuration for the MAC simulator."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from ..core import Node
from .dcf import DcfParams
from .links import LinkModel

ACK_BYTES = 14


class ConfigError(ValueError):
    """Invalid or unknown configuration."""


@dataclass
class MacConfig:
    access: str = "csma"              # "csma" | "tdma"
    nc: bool = True
    relay_access: str = "pifs"        # "pifs" | "dcf"
    packet_bytes: int = 1000          # body length L (payload + CRC); 8 ms at 1 Mb/s
    rate_bps: float = 1e6
    queue_size: int = 16
    buffer_size: int | None = None    # defaults to queue_size
    send_buffer_size: int | None = None
    counter_bits: int = 32
    traffic: str = "saturated"        # "saturated" | "poisson"
    arrival_rate_pps: float = 50.0
    duration_s: float = 30.0
    warmup: float = 0.1
    seed: int = 1
    slot_us: int = 9
    sifs_us: int = 16
    difs_us: int = 34
    cw_min: int = 15
    cw_max: int = 1023
    retry_limit: int = 7
    guard_us: int = 0
    link_loss: dict[str, float] = field(default_factory=dict)   # {"A-R": 0.1, ...}
    power: dict[str, float] = field(default_factory=dict)       # {"B": 0.5}
    operating_snr_db: float | None = None

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.access not in ("csma", "tdma"):
            raise ConfigError(f"access must be 'csma' or 'tdma', got {self.access!r}")
        if self.relay_access not in ("pifs", "dcf"):
            raise ConfigError(f"relay_access must be 'pifs' or 'dcf', got {self.relay_access!r}")
        if self.traffic not in ("saturated", "poisson"):
            raise ConfigError(f"traffic must be 'saturated' or 'poisson', got {self.traffic!r}")
        if self.rate_bps <= 0:
            raise ConfigError("rate_bps must be positive")
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be positive")
        if not 0 <= self.warmup < 0.5:
            raise ConfigError("warmup must be in [0, 0.5)")
        if self.packet_bytes < 5:
            raise ConfigError("packet_bytes must leave room for the 4-byte CRC")
        for name in ("queue_size", "buffer_size", "send_buffer_size"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 1 <= self.counter_bits <= 32:
            raise ConfigError("counter_bits must be in [1, 32]")
        if self.traffic == "poisson" and self.arrival_rate_pps <= 0:
            raise ConfigError("arrival_rate_pps must be positive")
        for key, p in self.link_loss.items():
            _parse_link(key)
            if not 0 <= p <= 1:
                raise ConfigError(f"link_loss[{key}] outside [0, 1]")
        for key, p in self.power.items():
            _parse_node(key)
            if p < 0:
                raise ConfigError(f"power[{key}] must be >= 0")
        try:
            self.dcf_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    # derived quantities -------------------------------------------------

    @property
    def frame_us(self) -> int:
        return int(round(8e6 * self.packet_bytes / self.rate_bps))

    @property
    def ack_us(self) -> int:
        return int(round(8e6 * ACK_BYTES / self.rate_bps))

    @property
    def duration_us(self) -> int:
        return int(round(self.duration_s * 1e6))

    @property
    def buffers(self) -> tuple[int, int, int]:
        q = self.queue_size
        return (
            q,
            self.buffer_size if self.buffer_size is not None else q,
            self.send_buffer_size if self.send_buffer_size is not None else q,
        )

    def dcf_params(self) -> DcfParams:
        return DcfParams(
            slot_us=self.slot_us,
            sifs_us=self.sifs_us,
            difs_us=self.difs_us,
            cw_min=self.cw_min,
            cw_max=self.cw_max,
            retry_limit=self.retry_limit,
        )

    def link_model(self) -> LinkModel:
        return LinkModel(
            per_link_loss={_parse_link(k): v for k, v in self.link_loss.items()},
            tx_power={_parse_node(k): v for k, v in self.power.items()},
            operating_snr_db=self.operating_snr_db,
            frame_bits=8 * self.packet_bytes,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in fields(cls)}


def _parse_node(name: str) -> Node:
    try:
        node = Node[name.strip().upper()]
    except KeyError:
        raise ConfigError(f"unknown node {name!r}") from None
    if node is Node.BROADCAST:
        raise ConfigError("BROADCAST is not a node")
    return node


def _parse_link(key: str) -> tuple[Node, Node]:
    parts = key.replace(">", "-").split("-")
    parts = [p for p in parts if p]
    if len(parts) != 2:
        raise ConfigError(f"link keys look like 'A-R', got {key!r}")
    return _parse_node(parts[0]), _parse_node(parts[1])

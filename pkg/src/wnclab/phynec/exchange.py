"""End-to-end two-way exchange through a decode-and-forward relay.

Each hop is one OFDM frame. The relay decodes both uplinks, re-encodes each
message with its own LDPC encoder and interleaver, then either forwards them
in two extra frames (4-step) or maps both streams jointly onto one higher
order constellation (3-step). In the joint case each sink demaps with its own
bits as side information.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .channel import LinkChannel, apply_channel, equalize, estimate_channel
from .constellation import BPSK, Constellation, joint_bits, psk_modulate, subset_llrs
from .fec import LdpcCode, default_code, interleaver
from .labeling import search_optimal_labeling
from .ofdm import FRAME_S, PILOT_PLAN_V1, build_frame, extract_data, ofdm_demodulate, ofdm_modulate

TRAFFIC = ("symmetric", "asymmetric")
LABELINGS = ("optimal", "gray")
EXCHANGES = ("3-step", "4-step")


class PhyConfigError(ValueError):
    """Invalid PHY scenario."""


@dataclass(frozen=True)
class PhyScenario:
    traffic: str = "asymmetric"      # symmetric: BPSK + BPSK, asymmetric: BPSK + QPSK
    labeling: str = "optimal"        # relay constellation labeling
    exchange: str = "3-step"
    snr_db: float = 10.0
    n_exchanges: int = 3
    code_n: int = 1152
    code_seed: int = 2024
    max_iter: int = 50
    seed: int = 1
    estimate_channel: bool = True    # pilot-based estimates; False uses the true gain
    random_phase: bool = True

    def __post_init__(self) -> None:
        if self.traffic not in TRAFFIC:
            raise PhyConfigError(f"traffic must be one of {TRAFFIC}, got {self.traffic!r}")
        if self.labeling not in LABELINGS:
            raise PhyConfigError(f"labeling must be one of {LABELINGS}, got {self.labeling!r}")
        if self.exchange not in EXCHANGES:
            raise PhyConfigError(f"exchange must be one of {EXCHANGES}, got {self.exchange!r}")
        if self.n_exchanges < 1:
            raise PhyConfigError("n_exchanges must be >= 1")
        if self.max_iter < 1:
            raise PhyConfigError("max_iter must be >= 1")
        if self.code_n <= 0 or self.code_n % 6:
            raise PhyConfigError("code_n must be a positive multiple of 6")
        if self.code_n > 36960:
            raise PhyConfigError("code_n cannot exceed one frame of BPSK cells (36960)")

    @property
    def bits_a(self) -> int:
        return 1

    @property
    def bits_b(self) -> int:
        return 1 if self.traffic == "symmetric" else 2

    @property
    def frames_per_exchange(self) -> int:
        return 3 if self.exchange == "3-step" else 4


@dataclass
class PhyMetrics:
    snr_db: float
    traffic: str
    exchange: str
    labeling: str
    throughput: float                     # b/s, mean over the two flows
    flow_throughput: dict[str, float] = field(default_factory=dict)
    ber: float = 0.0
    fer: float = 0.0
    blocks: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=None)
def relay_constellation(traffic: str, labeling: str) -> Constellation:
    M, split = (4, (1, 1)) if traffic == "symmetric" else (8, (1, 2))
    if labeling == "gray":
        return Constellation.gray(M)
    return search_optimal_labeling(M, split).constellation


def source_constellation(bits: int) -> Constellation:
    return BPSK if bits == 1 else Constellation.gray(4)


class _Link:
    """One OFDM frame over a flat channel with a fresh phase."""

    def __init__(self, scen: PhyScenario, rng: np.random.Generator):
        self.scen = scen
        self.rng = rng

    def send(self, cells: np.ndarray) -> tuple[np.ndarray, float]:
        phase = self.rng.uniform(0, 2 * np.pi) if self.scen.random_phase else 0.0
        ch = LinkChannel.from_snr_db(self.scen.snr_db, h=np.exp(1j * phase))
        grid = ofdm_demodulate(apply_channel(ofdm_modulate(build_frame(cells)), ch, self.rng))
        if self.scen.estimate_channel:
            est = estimate_channel(grid)
        else:
            est = np.full_like(grid, np.sqrt(ch.P) * ch.h)
        y = extract_data(equalize(grid, est))
        return y, ch.sigma2 / (ch.P * abs(ch.h) ** 2)


class _Stream:
    """Codewords of one message laid out over one frame's worth of bits."""

    def __init__(self, code: LdpcCode, bits_per_cell: int, seed: int):
        self.code = code
        self.capacity = PILOT_PLAN_V1.data_cells * bits_per_cell
        self.n_blocks = self.capacity // code.n
        self.perm = interleaver(self.capacity, seed)

    def bits(self, info: np.ndarray) -> np.ndarray:
        coded = np.zeros(self.capacity, dtype=np.uint8)
        coded[: self.n_blocks * self.code.n] = self.code.encode(info).ravel()
        return coded[self.perm]

    def decode(self, llr_tx: np.ndarray, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
        llr = np.empty(self.capacity)
        llr[self.perm] = llr_tx
        used = llr[: self.n_blocks * self.code.n].reshape(self.n_blocks, self.code.n)
        return self.code.decode(used, max_iter)


def _uplink(link: _Link, stream: _Stream, info: np.ndarray, c: Constellation, max_iter: int):
    y, s2 = link.send(psk_modulate(stream.bits(info), c))
    llr = subset_llrs(y, np.zeros((y.size, 0)), (), c, s2).ravel()
    return stream.decode(llr, max_iter)


def run_phy_exchange(scen: PhyScenario) -> PhyMetrics:
    code = default_code(scen.code_n, scen.code_seed)
    na, nb = scen.bits_a, scen.bits_b
    ca, cb = source_constellation(na), source_constellation(nb)
    rng = np.random.default_rng(np.random.SeedSequence(scen.seed))
    link = _Link(scen, rng)
    # interleaver seeds are fixed per role so that every node agrees on them
    up_a, up_b = _Stream(code, na, 11), _Stream(code, nb, 12)
    relay_a, relay_b = _Stream(code, na, 21), _Stream(code, nb, 22)
    cr = relay_constellation(scen.traffic, scen.labeling)

    good = {"A->B": 0, "B->A": 0}
    bit_err = bit_tot = blk_err = blk_tot = 0
    for _ in range(scen.n_exchanges):
        ua = rng.integers(0, 2, (up_a.n_blocks, code.k), dtype=np.uint8)
        ub = rng.integers(0, 2, (up_b.n_blocks, code.k), dtype=np.uint8)
        ra, _ = _uplink(link, up_a, ua, ca, scen.max_iter)
        rb, _ = _uplink(link, up_b, ub, cb, scen.max_iter)

        if scen.exchange == "4-step":
            at_b, _ = _uplink(link, relay_a, ra, ca, scen.max_iter)
            at_a, _ = _uplink(link, relay_b, rb, cb, scen.max_iter)
        else:
            sym = psk_modulate(joint_bits(relay_a.bits(ra), relay_b.bits(rb), na, nb), cr)
            k = na + nb
            # sink A knows its own bits (the first na of each word)
            y, s2 = link.send(sym)
            known = relay_a.bits(ua).reshape(-1, na)
            llr = subset_llrs(y, known, tuple(range(na)), cr, s2).ravel()
            at_a, _ = relay_b.decode(llr, scen.max_iter)
            # sink B knows the last nb bits
            y, s2 = link.send(sym)
            known = relay_b.bits(ub).reshape(-1, nb)
            llr = subset_llrs(y, known, tuple(range(na, k)), cr, s2).ravel()
            at_b, _ = relay_a.decode(llr, scen.max_iter)

        for name, got, sent in (("A->B", at_b, ua), ("B->A", at_a, ub)):
            ok = np.all(got == sent, axis=1)
            good[name] += int(ok.sum())
            blk_err += int((~ok).sum())
            blk_tot += ok.size
            bit_err += int((got != sent).sum())
            bit_tot += sent.size

    airtime = scen.n_exchanges * scen.frames_per_exchange * FRAME_S
    flows = {name: good[name] * code.k / airtime for name in good}
    return PhyMetrics(
        snr_db=float(scen.snr_db),
        traffic=scen.traffic,
        exchange=scen.exchange,
        labeling=scen.labeling if scen.exchange == "3-step" else "none",
        throughput=float(np.mean(list(flows.values()))),
        flow_throughput=flows,
        ber=bit_err / bit_tot,
        fer=blk_err / blk_tot,
        blocks=blk_tot,
    )


def constellation_dump(snr_db: float, c: Constellation | None = None, seed: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Equalised data cells of one frame and the points that were sent."""
    c = c or Constellation.gray(4)
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, PILOT_PLAN_V1.data_cells * c.bits_per_symbol, dtype=np.uint8)
    x = psk_modulate(bits, c)
    link = _Link(PhyScenario(snr_db=snr_db, seed=seed), rng)
    y, _ = link.send(x)
    return y, x

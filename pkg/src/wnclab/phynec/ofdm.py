"""OFDM frame grid, pilot plan and the FFT modem.

A frame is 220 OFDM symbols of 256 subcarriers. The 198 used subcarriers are
the bins -99..-1 and 1..99 (DC and the band edges stay empty). Each symbol
carries 168 data cells, 12 continual pilots on fixed subcarriers and 18
scattered pilots on a lattice that shifts from symbol to symbol. Pilots are
known BPSK values boosted by 3 dB; data cells have unit mean power.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N_FFT = 256
N_SYMBOLS = 220
CP_LEN = 32
HALF_BAND = 99
SYMBOL_US = 46.546
GUARD_US = 5.8182
FRAME_S = N_SYMBOLS * (SYMBOL_US + GUARD_US) * 1e-6
PILOT_BOOST = np.sqrt(2.0)

NULL, DATA, CONTINUAL, SCATTERED = 0, 1, 2, 3

# used subcarriers in increasing frequency, as signed bin numbers
USED_FREQ = np.concatenate([np.arange(-HALF_BAND, 0), np.arange(1, HALF_BAND + 1)])
USED_BINS = USED_FREQ % N_FFT


@dataclass(frozen=True)
class PilotPlan:
    """Where pilots sit, as positions in the list of used subcarriers."""

    name: str
    continual: tuple[int, ...]
    scattered_count: int
    scattered_spacing: int
    shift_step: int
    shift_period: int
    seed: int = 0x5EED
    n_symbols: int = N_SYMBOLS
    cell_type: np.ndarray = field(init=False, repr=False, compare=False)
    pilot_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n_used = len(USED_BINS)
        others = np.setdiff1d(np.arange(n_used), self.continual)
        grid = np.full((self.n_symbols, N_FFT), NULL, dtype=np.int8)
        grid[:, USED_BINS] = DATA
        grid[:, USED_BINS[list(self.continual)]] = CONTINUAL
        for t in range(self.n_symbols):
            grid[t, USED_BINS[others[self.scattered_positions(t)]]] = SCATTERED
        rng = np.random.default_rng(self.seed)
        signs = 1.0 - 2.0 * rng.integers(0, 2, size=grid.shape)
        values = np.where((grid == CONTINUAL) | (grid == SCATTERED), PILOT_BOOST * signs, 0.0)
        object.__setattr__(self, "cell_type", grid)
        object.__setattr__(self, "pilot_values", values.astype(complex))

    def scattered_positions(self, t: int) -> np.ndarray:
        """Scattered pilot positions for symbol ``t`` within the non-continual subcarriers."""
        shift = (t % self.shift_period) * self.shift_step
        return shift + self.scattered_spacing * np.arange(self.scattered_count)

    @property
    def data_per_symbol(self) -> int:
        return int((self.cell_type[0] == DATA).sum())

    @property
    def data_cells(self) -> int:
        return int((self.cell_type == DATA).sum())

    def census(self) -> dict[str, int]:
        row = self.cell_type[0]
        return {
            "data": int((row == DATA).sum()),
            "continual": int((row == CONTINUAL).sum()),
            "scattered": int((row == SCATTERED).sum()),
            "null": int((row == NULL).sum()),
        }


PILOT_PLAN_V1 = PilotPlan(
    name="v1",
    continual=tuple(int(round(x)) for x in np.linspace(0, len(USED_BINS) - 1, 12)),
    scattered_count=18,
    scattered_spacing=10,
    shift_step=2,
    shift_period=5,
)


def build_frame(data: np.ndarray, plan: PilotPlan = PILOT_PLAN_V1) -> np.ndarray:
    """Place data cells (symbol by symbol, FFT bin order) and pilots on the grid."""
    data = np.asarray(data, dtype=complex).ravel()
    if data.size != plan.data_cells:
        raise ValueError(f"frame holds {plan.data_cells} data cells, got {data.size}")
    grid = plan.pilot_values.copy()
    grid[plan.cell_type == DATA] = data
    return grid


def extract_data(grid: np.ndarray, plan: PilotPlan = PILOT_PLAN_V1) -> np.ndarray:
    return np.asarray(grid)[plan.cell_type == DATA]


def to_frequency_order(grid: np.ndarray) -> np.ndarray:
    """Used subcarriers of each symbol in increasing frequency, shape ``(T, 198)``."""
    return np.asarray(grid)[:, USED_BINS]


def ofdm_modulate(grid: np.ndarray) -> np.ndarray:
    """Unitary inverse FFT per symbol plus a cyclic prefix; returns a flat sample vector."""
    grid = np.asarray(grid, dtype=complex)
    if grid.ndim != 2 or grid.shape[1] != N_FFT:
        raise ValueError(f"grid must be (symbols, {N_FFT})")
    body = np.fft.ifft(grid, axis=1, norm="ortho")
    return np.concatenate([body[:, -CP_LEN:], body], axis=1).ravel()


def ofdm_demodulate(samples: np.ndarray, n_symbols: int | None = None) -> np.ndarray:
    samples = np.asarray(samples, dtype=complex)
    step = N_FFT + CP_LEN
    if samples.size % step:
        raise ValueError(f"sample count must be a multiple of {step}")
    rows = samples.reshape(-1, step)
    if n_symbols is not None and rows.shape[0] != n_symbols:
        raise ValueError(f"expected {n_symbols} symbols, got {rows.shape[0]}")
    return np.fft.fft(rows[:, CP_LEN:], axis=1, norm="ortho")

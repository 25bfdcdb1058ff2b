"""Flat-fading AWGN link, pilot-based channel estimation and equalisation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import PILOT_PLAN_V1, SCATTERED, USED_BINS, USED_FREQ, PilotPlan


@dataclass(frozen=True)
class LinkChannel:
    """``y = sqrt(P) * h * x + z`` with ``z ~ CN(0, sigma2)``."""

    h: complex = 1.0
    P: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.P < 0:
            raise ValueError("P must be non-negative")

    @property
    def snr(self) -> float:
        return self.P * abs(self.h) ** 2 / self.sigma2

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.snr)

    @classmethod
    def from_snr_db(cls, snr_db: float, h: complex = 1.0, P: float = 1.0) -> LinkChannel:
        return cls(h=h, P=P, sigma2=P * abs(h) ** 2 / 10.0 ** (snr_db / 10.0))


def apply_channel(x: np.ndarray, ch: LinkChannel, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    z = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return np.sqrt(ch.P) * ch.h * x + np.sqrt(ch.sigma2 / 2.0) * z


def _interp_complex(xq: np.ndarray, xp: np.ndarray, fp: np.ndarray) -> np.ndarray:
    return np.interp(xq, xp, fp.real) + 1j * np.interp(xq, xp, fp.imag)


def estimate_channel(grid_rx: np.ndarray, plan: PilotPlan = PILOT_PLAN_V1) -> np.ndarray:
    """Least-squares gains at scattered pilots, interpolated over time then frequency.

    Returns an array shaped like the grid; entries outside the used band are 1.
    Interpolation is linear with the nearest estimate held beyond the ends.
    """
    grid_rx = np.asarray(grid_rx, dtype=complex)
    used = grid_rx[:, USED_BINS]
    pilots = plan.cell_type[:, USED_BINS] == SCATTERED
    ref = plan.pilot_values[:, USED_BINS]
    n_sym, n_used = used.shape
    t = np.arange(n_sym)

    # subcarriers that ever carry a scattered pilot get a full time series
    est_cols = {}
    for k in range(n_used):
        rows = np.flatnonzero(pilots[:, k])
        if rows.size:
            ls = used[rows, k] / ref[rows, k]
            est_cols[k] = _interp_complex(t, rows, ls)
    cols = np.array(sorted(est_cols))
    series = np.stack([est_cols[k] for k in cols], axis=1)

    # frequency interpolation runs over signed subcarrier numbers, so the gap at DC counts
    full = np.empty((n_sym, n_used), dtype=complex)
    for i in range(n_sym):
        full[i] = _interp_complex(USED_FREQ, USED_FREQ[cols], series[i])

    out = np.ones_like(grid_rx)
    out[:, USED_BINS] = full
    return out


def equalize(grid_rx: np.ndarray, estimates: np.ndarray) -> np.ndarray:
    eq = np.array(grid_rx, dtype=complex)
    eq[:, USED_BINS] = eq[:, USED_BINS] / estimates[:, USED_BINS]
    return eq


def evm(received: np.ndarray, reference: np.ndarray) -> float:
    """RMS error vector relative to the RMS reference amplitude."""
    received = np.asarray(received)
    reference = np.asarray(reference)
    return float(np.sqrt(np.mean(np.abs(received - reference) ** 2) / np.mean(np.abs(reference) ** 2)))


def data_noise_variance(ch: LinkChannel) -> float:
    """Noise variance left on an equalised data cell, assuming a perfect estimate."""
    return ch.sigma2 / (ch.P * abs(ch.h) ** 2)



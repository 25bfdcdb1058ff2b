import numpy as np
import pytest

from wnclab.phynec.channel import (
    LinkChannel,
    apply_channel,
    data_noise_variance,
    equalize,
    estimate_channel,
    evm,
)
from wnclab.phynec.constellation import Constellation, psk_modulate
from wnclab.phynec.ofdm import PILOT_PLAN_V1, USED_BINS, build_frame, extract_data, ofdm_demodulate, ofdm_modulate


def qpsk_frame(seed):
    rng = np.random.default_rng(seed)
    c = Constellation.gray(4)
    x = psk_modulate(rng.integers(0, 2, 2 * PILOT_PLAN_V1.data_cells), c)
    return x, build_frame(x)


@pytest.mark.parametrize("snr_db", [0.0, 6.0, 16.0])
def test_empirical_snr_within_tenth_db(snr_db):
    rng = np.random.default_rng(int(snr_db) + 1)
    ch = LinkChannel.from_snr_db(snr_db, h=0.7 * np.exp(1j), P=2.0)
    assert ch.snr_db == pytest.approx(snr_db)
    x = np.exp(2j * np.pi * rng.random(200_000))
    y = apply_channel(x, ch, rng)
    noise = y - np.sqrt(ch.P) * ch.h * x
    measured = 10 * np.log10(ch.P * abs(ch.h) ** 2 / np.mean(np.abs(noise) ** 2))
    assert abs(measured - snr_db) < 0.1


def test_channel_validation():
    with pytest.raises(ValueError):
        LinkChannel(sigma2=0.0)
    with pytest.raises(ValueError):
        LinkChannel(P=-1.0)


def test_estimator_exact_without_noise():
    _, grid = qpsk_frame(0)
    h = 0.6 * np.exp(0.8j)
    rx = h * grid
    est = estimate_channel(rx)
    assert np.allclose(est[:, USED_BINS], h, atol=1e-12)
    assert np.allclose(extract_data(equalize(rx, est)), extract_data(grid))


def test_estimator_tracks_linear_frequency_slope():
    # linear interpolation is exact for a channel linear in subcarrier index
    _, grid = qpsk_frame(1)
    k = np.arange(256)
    freq = np.where(k < 128, k, k - 256)
    H = (1.0 + 0.002 * freq) * np.exp(0.1j)
    est = estimate_channel(grid * H[None, :])
    used = est[:, USED_BINS]
    ref = H[USED_BINS]
    inner = slice(10, -10)   # beyond the outermost pilots the edge value is held
    assert np.allclose(used[:, inner], ref[None, inner], atol=1e-9)


def test_evm_at_16_db():
    x, grid = qpsk_frame(2)
    rng = np.random.default_rng(3)
    ch = LinkChannel.from_snr_db(16.0, h=np.exp(2.0j))
    rx = ofdm_demodulate(apply_channel(ofdm_modulate(grid), ch, rng))
    y = extract_data(equalize(rx, estimate_channel(rx)))
    e = evm(y, x)
    assert e < 0.2
    # perfect knowledge of h gives the noise-only value sqrt(1/snr)
    y_ideal = extract_data(equalize(rx, np.full_like(rx, ch.h)))
    assert evm(y_ideal, x) == pytest.approx(10 ** (-16 / 20), rel=0.02)
    assert e > evm(y_ideal, x)


def test_evm_definition():
    ref = np.array([1, 1j, -1, -1j])
    assert evm(ref, ref) == 0.0
    assert evm(ref * 1.1, ref) == pytest.approx(0.1)


def test_data_noise_variance():
    ch = LinkChannel(h=0.5, P=2.0, sigma2=0.1)
    assert data_noise_variance(ch) == pytest.approx(0.1 / (2.0 * 0.25))


def test_vanishing_noise_and_rotation():
    rng = np.random.default_rng(0)
    x = np.exp(2j * np.pi * rng.random(100))
    assert np.allclose(apply_channel(x, LinkChannel(sigma2=1e-30), rng), x)
    theta = 0.7
    y = apply_channel(x, LinkChannel(h=np.exp(1j * theta), sigma2=1e-30), rng)
    assert np.allclose(y, x * np.exp(1j * theta))
    a = apply_channel(x, LinkChannel(), np.random.default_rng(5))
    assert np.array_equal(a, apply_channel(x, LinkChannel(), np.random.default_rng(5)))

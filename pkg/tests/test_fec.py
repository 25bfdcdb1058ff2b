import numpy as np
import pytest

from wnclab.phynec.fec import LdpcCode, default_code, interleaver


def gf2_rank(H: np.ndarray) -> int:
    """Rank over GF(2) with rows packed into Python integers."""
    rows = [int("".join(map(str, r)), 2) for r in H]
    rank = 0
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
    return rank


@pytest.fixture(scope="module")
def code():
    return default_code()


def test_regular_degrees(code):
    assert code.H.shape == (576, 1152)
    assert np.all(code.H.sum(axis=0) == 3)
    assert np.all(code.H.sum(axis=1) == 6)
    assert code.k == 576 and code.rate == 0.5


def test_full_rank_by_independent_elimination(code):
    assert gf2_rank(code.H) == 576


def test_codewords_satisfy_parity(code):
    rng = np.random.default_rng(0)
    u = rng.integers(0, 2, (20, code.k), dtype=np.uint8)
    c = code.encode(u)
    assert not (code.H.astype(int) @ c.T.astype(int) % 2).any()
    assert not code.syndrome(c).any()
    assert np.array_equal(c[:, code.info_positions], u)
    assert np.array_equal(code.encode(u[0]), c[0])


def test_encoder_is_linear(code):
    rng = np.random.default_rng(1)
    a, b = rng.integers(0, 2, (2, code.k), dtype=np.uint8)
    assert np.array_equal(code.encode(a ^ b), code.encode(a) ^ code.encode(b))


def test_noiseless_decode(code):
    u = np.random.default_rng(2).integers(0, 2, (4, code.k), dtype=np.uint8)
    llr = 5.0 * (1.0 - 2.0 * code.encode(u))
    got, ok = code.decode(llr)
    assert ok.all() and np.array_equal(got, u)


def test_corrects_a_few_flipped_bits(code):
    rng = np.random.default_rng(3)
    u = rng.integers(0, 2, code.k, dtype=np.uint8)
    llr = 2.0 * (1.0 - 2.0 * code.encode(u).astype(float))
    flip = rng.choice(code.n, 20, replace=False)
    llr[flip] *= -1
    got, ok = code.decode(llr)
    assert ok and np.array_equal(got, u)


def test_waterfall_on_bpsk(code):
    rng = np.random.default_rng(4)
    u = rng.integers(0, 2, (40, code.k), dtype=np.uint8)
    x = 1.0 - 2.0 * code.encode(u)
    results = {}
    for esn0_db in (-4.0, 1.0):
        s2 = 10 ** (-esn0_db / 10)
        y = x + np.sqrt(s2 / 2) * rng.standard_normal(x.shape)
        got, ok = code.decode(4 * y / s2)
        results[esn0_db] = np.mean(np.any(got != u, axis=1))
    assert results[-4.0] > 0.5
    assert results[1.0] == 0.0


def test_shape_checks(code):
    with pytest.raises(ValueError):
        code.encode(np.zeros(10, dtype=np.uint8))
    with pytest.raises(ValueError):
        code.decode(np.zeros(10))
    with pytest.raises(ValueError):
        LdpcCode(n=100)


def test_other_lengths_and_seeds():
    small = LdpcCode(n=96, seed=5)
    assert small.k == 48 and gf2_rank(small.H) == 48
    assert not np.array_equal(LdpcCode(n=96, seed=6).H, small.H)
    assert default_code() is default_code()


def test_interleaver_is_permutation():
    p = interleaver(1000, 7)
    assert np.array_equal(np.sort(p), np.arange(1000))
    assert np.array_equal(p, interleaver(1000, 7))
    assert not np.array_equal(p, interleaver(1000, 8))


def test_all_zero_is_a_codeword(code):
    assert not code.encode(np.zeros(code.k, dtype=np.uint8)).any()


def test_decoding_lowers_ber_at_4db(code):
    rng = np.random.default_rng(8)
    u = rng.integers(0, 2, (30, code.k), dtype=np.uint8)
    c = code.encode(u)
    s2 = 10 ** (-4.0 / 10)
    y = (1.0 - 2.0 * c) + np.sqrt(s2 / 2) * rng.standard_normal(c.shape)
    raw_ber = np.mean((y < 0)[:, code.info_positions] != u)
    got, _ = code.decode(4 * y / s2)
    assert raw_ber > 0.005
    assert np.mean(got != u) < raw_ber

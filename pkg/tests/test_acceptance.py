"""Acceptance criteria 1-11, one test each.

Every test records a single ``CRITERION n: PASS|FAIL ...`` line (printed in the
terminal summary by ``conftest.py``) and then asserts. Tolerances are the
stated ones; nothing here is tuned to make a result pass.
"""

import itertools
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from wnclab.core import Node
from wnclab.macsim import MacConfig, run_scenario
from wnclab.ncmac import EndpointState, RelayState
from wnclab.phynec.constellation import Constellation, psk_modulate, subset_demap, word_bits
from wnclab.phynec.exchange import PhyScenario, constellation_dump, relay_constellation, run_phy_exchange
from wnclab.phynec.labeling import all_labelings, score_labeling, search_optimal_labeling
from wnclab.phynec.channel import evm
from wnclab.phynec.ofdm import PILOT_PLAN_V1, build_frame, extract_data, ofdm_demodulate, ofdm_modulate

SEEDS = range(1, 11)
TDMA_NC = 1e6 / 3 / 8000        # one packet per node every three 8 ms slots
TDMA_PLAIN = 1e6 / 4 / 8000


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def mean_metrics(**kwargs):
    """Metrics of one scenario for each of the ten seeds."""
    return [run_scenario(MacConfig(seed=s, **kwargs)) for s in SEEDS]


def test_criterion_01_tdma_nc_anchor():
    t = time.perf_counter()
    m = run_scenario(MacConfig(access="tdma", nc=True))
    dt = time.perf_counter() - t
    ok = abs(m.throughput / 41.67 - 1) <= 0.01 and dt < 10
    report(1, ok, f"TDMA+NC {m.throughput:.3f} pkt/s/node (target 41.67 +-1%), {dt:.2f} s")


def test_criterion_02_tdma_plain_anchor_and_ratio():
    t = time.perf_counter()
    plain = run_scenario(MacConfig(access="tdma", nc=False))
    coded = run_scenario(MacConfig(access="tdma", nc=True))
    dt = time.perf_counter() - t
    ratio = coded.throughput / plain.throughput
    ok = abs(plain.throughput / 31.25 - 1) <= 0.01 and abs(ratio - 4 / 3) <= 0.01 and dt < 10
    report(2, ok, f"TDMA 4-step {plain.throughput:.3f} pkt/s/node (31.25 +-1%), NC/no-NC {ratio:.4f} (1.333 +-0.01), {dt:.2f} s")


def test_criterion_03_csma_nc_band():
    nc = np.mean([m.throughput for m in mean_metrics(access="csma", nc=True)])
    plain = np.mean([m.throughput for m in mean_metrics(access="csma", nc=False)])
    gain = nc / plain - 1
    between = TDMA_PLAIN < nc < TDMA_NC
    ok = between and 0.15 <= gain <= 0.40
    report(3, ok, f"CSMA+NC {nc:.2f} vs no-NC {plain:.2f} pkt/s/node over 10 seeds: gain {100 * gain:.1f}% "
                  f"(band 15-40%), between TDMA anchors: {between}")


def test_criterion_04_queue_sweep():
    qs = [1, 2, 4, 8, 16, 32]
    loss, delay = [], []
    for q in qs:
        ms = mean_metrics(access="csma", nc=True, queue_size=q)
        loss.append(np.mean([m.loss_rate for m in ms]))
        delay.append(np.mean([m.avg_delay for m in ms]))
    plain_q1 = np.mean([m.avg_delay for m in mean_metrics(access="csma", nc=False, queue_size=1)])
    loss_mono = all(b <= a for a, b in zip(loss, loss[1:]))
    delay_up = all(b > a for a, b in zip(delay, delay[1:]))
    q1_lower = delay[0] < plain_q1
    ok = loss_mono and loss[-1] < 0.01 and delay_up and q1_lower
    report(4, ok, "loss " + "/".join(f"{x:.4f}" for x in loss)
           + f" (nonincreasing {loss_mono}, Q=32 <1%: {loss[-1] < 0.01}); delay ms "
           + "/".join(f"{1e3 * x:.1f}" for x in delay)
           + f" (increasing {delay_up}); Q=1 NC {1e3 * delay[0]:.1f} ms < no-NC {1e3 * plain_q1:.1f} ms: {q1_lower}")


def test_criterion_05_power_asymmetry():
    kw = dict(access="csma", nc=True, operating_snr_db=12.0)
    full = mean_metrics(power={"B": 1.0}, **kw)
    half = mean_metrics(power={"B": 0.5}, **kw)

    def avg(ms, node, attr):
        return float(np.mean([getattr(m.per_node[node], attr) for m in ms]))

    b_loss = (avg(full, "B", "uplink_loss"), avg(half, "B", "uplink_loss"))
    a_loss = (avg(full, "A", "loss_rate"), avg(half, "A", "loss_rate"))
    a_tp = (avg(full, "A", "throughput"), avg(half, "A", "throughput"))
    ok = b_loss[1] > b_loss[0] and abs(a_loss[1] - a_loss[0]) < 0.02 and a_tp[1] < a_tp[0]
    report(5, ok, f"B->R loss {b_loss[0]:.3f} -> {b_loss[1]:.3f}; A loss {a_loss[0]:.4f} -> {a_loss[1]:.4f} "
                  f"(|change| < 2 pp); A throughput {a_tp[0]:.2f} -> {a_tp[1]:.2f} pkt/s")


def _brute(y, cands, c, tol=1e-12):
    """Enumerate the candidate words; among the minimisers take the smallest word."""
    dist = {w: abs(y - c.points[w]) ** 2 for w in cands}
    d_min = min(dist.values())
    return min(w for w, d in dist.items() if d <= d_min + tol * (1.0 + d_min))


def test_criterion_06_subset_demap_oracle():
    t = time.perf_counter()
    g = np.linspace(-1.5, 1.5, 64)
    y = (g[:, None] + 1j * g[None, :]).ravel()
    mismatches = cases = 0
    for M, split in ((4, (1, 1)), (8, (1, 2))):
        k = int(np.log2(M))
        table = word_bits(M)
        for c in (Constellation.gray(M), search_optimal_labeling(M, split).constellation):
            for r in range(k + 1):
                for pos in itertools.combinations(range(k), r):
                    for vals in itertools.product((0, 1), repeat=r):
                        kb = np.tile(np.array(vals, dtype=np.uint8), (y.size, 1))
                        got = subset_demap(y, kb, pos, c)
                        cands = [w for w in range(M) if all(table[w, p] == v for p, v in zip(pos, vals))]
                        unknown = [i for i in range(k) if i not in pos]
                        for i in range(y.size):
                            best = _brute(y[i], cands, c)
                            mismatches += not np.array_equal(got[i], table[best, unknown])
                        cases += y.size
    dt = time.perf_counter() - t
    ok = mismatches == 0 and dt < 5
    report(6, ok, f"{mismatches} mismatches in {cases} demap cases (M=4,8; all side-info patterns; 64x64 grid), {dt:.2f} s")


def test_criterion_07_labeling_certificate():
    t = time.perf_counter()
    res8 = search_optimal_labeling(8, (1, 2))
    gray8 = score_labeling(Constellation.gray(8), (1, 2))
    res4 = search_optimal_labeling(4, (1, 1))
    best4 = max(score_labeling(Constellation(4, tuple(p)), (1, 1)).key() for p in all_labelings(4, fix_zero=False))
    dt = time.perf_counter() - t
    ok = (abs(res8.score.sink_b - 2.0) < 1e-9 and res8.score.key() > gray8.key()
          and res4.score.key() == best4 and dt < 30)
    report(7, ok, f"M=8 sink-B distance {res8.score.sink_b:.6f} (sink A {res8.score.sink_a:.4f}) vs Gray "
                  f"{gray8.sink_b:.4f}/{gray8.sink_a:.4f}; M=4 equals optimum of 24 labelings: {res4.score.key() == best4}; {dt:.2f} s")


def test_criterion_08_noiseless_loopback():
    errors = 0
    for traffic, (na, nb) in (("symmetric", (1, 1)), ("asymmetric", (1, 2))):
        for labeling in ("optimal", "gray"):
            c = relay_constellation(traffic, labeling)
            k = na + nb
            table = word_bits(c.order)
            words = np.resize(np.arange(c.order), PILOT_PLAN_V1.data_cells)
            bits = table[words]
            grid = build_frame(psk_modulate(bits.ravel(), c))
            y = extract_data(ofdm_demodulate(ofdm_modulate(grid)))
            at_a = subset_demap(y, bits[:, :na], tuple(range(na)), c)
            at_b = subset_demap(y, bits[:, na:], tuple(range(na, k)), c)
            errors += int((at_a != bits[:, na:]).sum() + (at_b != bits[:, :na]).sum())
    rng = np.random.default_rng(0)
    cells = rng.normal(size=PILOT_PLAN_V1.data_cells) + 1j * rng.normal(size=PILOT_PLAN_V1.data_cells)
    grid = build_frame(cells)
    back = ofdm_demodulate(ofdm_modulate(grid))
    rel = float(np.linalg.norm(back - grid) / np.linalg.norm(grid))
    cell_rel = float(np.linalg.norm(extract_data(back) - cells) / np.linalg.norm(cells))
    ok = errors == 0 and rel < 1e-9 and cell_rel < 1e-9
    report(8, ok, f"{errors} bit errors over all joint words and both sinks; OFDM round-trip relative error {rel:.1e}")


def test_criterion_09_phy_throughput():
    t = time.perf_counter()
    three = run_phy_exchange(PhyScenario(traffic="symmetric", exchange="3-step", snr_db=14.0, n_exchanges=3))
    four = run_phy_exchange(PhyScenario(traffic="symmetric", exchange="4-step", snr_db=14.0, n_exchanges=3))
    ratio = three.throughput / four.throughput
    gains = {}
    for snr in (5.0, 6.0, 7.0, 8.0, 9.0):
        opt = run_phy_exchange(PhyScenario(traffic="asymmetric", labeling="optimal", snr_db=snr, n_exchanges=3))
        gray = run_phy_exchange(PhyScenario(traffic="asymmetric", labeling="gray", snr_db=snr, n_exchanges=3))
        gains[snr] = (opt.throughput, gray.throughput)
    dt = time.perf_counter() - t
    hit = [s for s, (o, g) in gains.items() if o >= 1.5 * g and o > 0]
    ok = abs(ratio / (4 / 3) - 1) <= 0.02 and bool(hit) and dt < 600
    curve = ", ".join(f"{s:.0f} dB {o / 1e3:.0f}k/{g / 1e3:.0f}k" for s, (o, g) in gains.items())
    report(9, ok, f"3-step/4-step {ratio:.4f} at 14 dB (4/3 +-2%); optimal/Gray [{curve}] "
                  f">=1.5x at {hit or 'none'} dB; {PILOT_PLAN_V1.data_cells * 3} relay symbols/point; {dt:.1f} s")


def test_criterion_10_evm_at_16_db():
    y, x = constellation_dump(16.0, seed=1)
    e = evm(y, x)
    c = Constellation.gray(4)
    nearest = np.argmin(np.abs(y[:, None] - c.points[None, :]), axis=1)
    sent = np.argmin(np.abs(x[:, None] - c.points[None, :]), axis=1)
    clustered = float(np.mean(nearest == sent))
    ok = e < 0.20 and clustered > 0.999
    report(10, ok, f"EVM {100 * e:.2f}% (< 20%), {100 * clustered:.3f}% of cells in their own quadrant cluster")


def _schedule(rng: np.random.Generator, stats: dict) -> None:
    q = int(rng.integers(1, 6))
    buf = int(rng.integers(1, 8))
    n_events = int(rng.integers(10, 120))
    p_up, p_down = rng.uniform(0, 0.5, 2)
    ends = {Node.A: EndpointState(Node.A, buffer_size=buf, body_len=16),
            Node.B: EndpointState(Node.B, buffer_size=buf, body_len=16)}
    relay = RelayState(queue_size=q, send_buffer_size=int(rng.integers(1, 6)))
    truth: dict[bytes, tuple[Node, int]] = {}
    counter = 0
    for _ in range(n_events):
        u = rng.random()
        if u < 0.55:
            node = Node.A if rng.random() < 0.5 else Node.B
            payload = counter.to_bytes(12, "big")
            counter += 1
            pkt = ends[node].on_transmit(payload)
            truth[payload] = (node, pkt.generation)
            if rng.random() >= p_up:
                act = relay.on_receive(pkt)
                stats["evictions"] += act.kind == "evict_uncoded"
                stats["coded"] += act.kind == "coded"
        else:
            pkt = relay.next_to_send()
            if pkt is None:
                continue
            for sink in (Node.A, Node.B):
                if rng.random() < p_down:
                    continue
                res = ends[sink].on_receive(pkt)
                if res.kind == "dropped":
                    continue
                stats[res.kind] += 1
                src, gen = truth.get(res.payload, (None, None))
                if src is not res.origin or src is sink or gen != res.generation:
                    stats["misdecodes"] += 1


def test_criterion_11_shim_property_suite():
    rng = np.random.default_rng(20240611)
    stats = {"decoded": 0, "passthrough": 0, "misdecodes": 0, "evictions": 0, "coded": 0}
    for _ in range(10_000):
        _schedule(rng, stats)
    ok = stats["misdecodes"] == 0 and stats["decoded"] > 0 and stats["evictions"] > 0
    report(11, ok, f"10000 random schedules: {stats['decoded']} decoded, {stats['passthrough']} pass-through, "
                   f"{stats['evictions']} evictions, {stats['misdecodes']} mis-decodes")


"""Random access: what network coding buys under CSMA/CA, and what the queue size does.

Under CSMA/CA the two sources win the channel in random order, so their
generation counters drift apart. The relay can only XOR packets of the same
generation; whatever waits too long in a full queue is evicted and broadcast
uncoded. Bigger queues keep more partners around (more coding, less loss)
but every packet waits longer.
"""

import numpy as np

from wnclab.macsim import MacConfig, run_scenario, simulate

SEEDS = range(1, 6)


def mean(**kw):
    ms = [run_scenario(MacConfig(seed=s, duration_s=30.0, **kw)) for s in SEEDS]
    return {
        "tp": np.mean([m.throughput for m in ms]),
        "loss": np.mean([m.loss_rate for m in ms]),
        "delay": np.mean([m.avg_delay for m in ms]),
        "coded": np.mean([m.coded_broadcasts / max(1, m.coded_broadcasts + m.uncoded_broadcasts) for m in ms]),
    }


plain = mean(nc=False)
print(f"no NC: {plain['tp']:.2f} pkt/s/node, delay {1e3 * plain['delay']:.1f} ms\n")
print("   Q   NC pkt/s   gain   loss %   delay ms   coded share")
for q in (1, 2, 4, 8, 16, 32):
    r = mean(nc=True, queue_size=q)
    print(f"{q:4d}   {r['tp']:8.2f}  {100 * (r['tp'] / plain['tp'] - 1):5.1f}%  {100 * r['loss']:6.3f}  "
          f"{1e3 * r['delay']:8.1f}   {100 * r['coded']:6.1f}%")

# the drift itself: A's counter minus B's counter as the run goes on
cfg = MacConfig(seed=1, duration_s=30.0)
latest = {"A": 0, "B": 0}
samples, next_t = [], 0
for rec in sorted((r for r in simulate(cfg) if r["kind"] == "origin"), key=lambda r: r["sent"]):
    while rec["sent"] >= next_t:
        samples.append(latest["A"] - latest["B"])
        next_t += 3_000_000
    latest[rec["node"]] = rec["gen"]
print("\ngeneration counter A minus B, every 3 s of one run:", samples)

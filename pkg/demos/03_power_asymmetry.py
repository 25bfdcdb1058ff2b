"""Halving node B's transmit power.

Frame loss on B's uplink follows the uncoded BPSK error rate at B's reduced
SNR. B's losses rise sharply; A's own packets still get through, but A
receives far fewer packets because B's side of each exchange is missing.
"""

import numpy as np

from wnclab.macsim import MacConfig, power_loss, run_scenario

SNR_DB = 12.0
print(f"operating SNR {SNR_DB} dB, 8000-bit frames")
for p in (1.0, 0.5, 0.25, 0.125):
    print(f"  power {p:5.3f}: frame loss {power_loss(p, SNR_DB, 8000):.4f}")

print("\npower_B   B uplink loss   A loss   A throughput   B throughput")
for p in (1.0, 0.5, 0.25, 0.125):
    ms = [run_scenario(MacConfig(seed=s, power={"B": p}, operating_snr_db=SNR_DB)) for s in range(1, 6)]

    def avg(node, attr):
        return np.mean([getattr(m.per_node[node], attr) for m in ms])

    print(f"{p:7.3f}   {avg('B', 'uplink_loss'):13.3f}   {avg('A', 'loss_rate'):6.4f}   "
          f"{avg('A', 'throughput'):12.2f}   {avg('B', 'throughput'):12.2f}")

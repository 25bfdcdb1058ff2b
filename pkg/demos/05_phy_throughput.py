"""Link-level throughput of decode-and-forward with joint modulation.

Each hop is one OFDM frame of 220 symbols. Three frames per exchange with
joint modulation, four with plain forwarding. With asymmetric traffic (BPSK
from A, QPSK from B, 8-PSK from the relay) the labeling decides how well the
sinks use their side information in the mid-SNR range. Takes about a minute.
"""

from wnclab.phynec.exchange import PhyScenario, run_phy_exchange

print("symmetric traffic (BPSK + BPSK, QPSK relay), kb/s per flow")
print(" SNR    3-step   4-step")
for snr in (-2.0, 0.0, 2.0, 4.0, 8.0):
    a = run_phy_exchange(PhyScenario(traffic="symmetric", exchange="3-step", snr_db=snr))
    b = run_phy_exchange(PhyScenario(traffic="symmetric", exchange="4-step", snr_db=snr))
    print(f"{snr:4.0f}  {a.throughput / 1e3:7.1f}  {b.throughput / 1e3:7.1f}")

print("\nasymmetric traffic (BPSK + QPSK, 8-PSK relay), kb/s per flow")
print(" SNR   optimal     Gray   4-step")
for snr in (3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0):
    o = run_phy_exchange(PhyScenario(traffic="asymmetric", labeling="optimal", snr_db=snr))
    g = run_phy_exchange(PhyScenario(traffic="asymmetric", labeling="gray", snr_db=snr))
    f = run_phy_exchange(PhyScenario(traffic="asymmetric", exchange="4-step", snr_db=snr))
    print(f"{snr:4.0f}  {o.throughput / 1e3:8.1f} {g.throughput / 1e3:8.1f} {f.throughput / 1e3:8.1f}")

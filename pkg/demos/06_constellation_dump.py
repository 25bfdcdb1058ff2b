"""Equalised QPSK cells of one OFDM frame at 16 dB.

Channel gains come from the scattered pilots only. Prints the EVM and a coarse
text density plot of the I/Q plane; pass a path to also save the samples as
CSV.
"""

import sys

import numpy as np

from wnclab.phynec.channel import evm
from wnclab.phynec.exchange import constellation_dump

y, x = constellation_dump(16.0, seed=1)
print(f"{y.size} data cells, EVM {100 * evm(y, x):.2f}% (noise alone: {100 * 10 ** (-16 / 20):.2f}%)")

# density over [-1.5, 1.5]^2; the four clusters sit on the axes
h, _, _ = np.histogram2d(y.imag, y.real, bins=31, range=[[-1.5, 1.5], [-1.5, 1.5]])
shade = " .:-=+*#%@"
scale = h.max()
for row in h[::-1]:
    print(" ".join(shade[min(9, int(9 * v / scale + 0.999))] if v else " " for v in row))

if len(sys.argv) > 1:
    np.savetxt(sys.argv[1], np.column_stack([y.real, y.imag, x.real, x.imag]),
               delimiter=",", header="i,q,ref_i,ref_q", comments="")
    print(f"wrote {sys.argv[1]}")

"""Relay labelings for joint modulation.

The relay sends one 8-PSK symbol carrying 1 bit for B and 2 bits for A. Sink
A already knows its own bit, so it only has to tell apart the 4 points with
that bit; sink B knows two bits and decides between 2 points. A good labeling
puts those pairs far apart. Gray labeling, built for the no-side-information
case, leaves them adjacent.
"""

from wnclab.phynec.constellation import Constellation
from wnclab.phynec.labeling import score_labeling, search_optimal_labeling

for M, split in ((4, (1, 1)), (8, (1, 2))):
    res = search_optimal_labeling(M, split)
    gray = score_labeling(Constellation.gray(M), split)
    print(f"M={M}, sink A knows {split[0]} bit(s), sink B knows {split[1]}: {res.evaluated} labelings searched")
    print("  label  point  angle")
    for bits, point, angle in res.table():
        print(f"  {bits:>5}  {point:5d}  {angle:5.0f}")
    s = res.score
    print(f"  min distance inside a subset: optimal A {s.sink_a:.3f} / B {s.sink_b:.3f}, "
          f"Gray A {gray.sink_a:.3f} / B {gray.sink_b:.3f}\n")

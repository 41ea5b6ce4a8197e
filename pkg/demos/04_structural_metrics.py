"""
Availability vs contiguity vs fragmentation
===========================================

Two campaigns can share the same USAR and still differ wildly in what a
wideband radio can do with them. Segments, LCCB and SFI separate those
cases; this demo builds the masks directly.
"""

import numpy as np

from specstruct import lccb, segments, sfi

FREQ_BIN = 60e3
N_BINS = 100


def describe(name, mask):
    segs = segments(np.asarray(mask, dtype=bool))
    usar = sum(mask) / len(mask)
    s = sfi(segs)
    print(f"{name:>22}: USAR {usar:.2f}, LCCB {lccb(segs, FREQ_BIN) / 1e6:6.2f} MHz, "
          f"SFI {'-' if s is None else f'{s:.3f}'}, {len(segs)} segment(s)")


# Same 70% availability, three very different structures:
block = [True] * 70 + [False] * 30
describe("one clean block", block)

split = [True] * 35 + [False] * 15 + [True] * 35 + [False] * 15
describe("two equal blocks", split)

comb = ([True] * 7 + [False] * 3) * 10
describe("comb (10 shards)", comb)

# SFI is 0 with a single segment, 0.5 with two equal ones, and climbs toward
# 1 as shards multiply; LCCB collapses from 4.2 MHz to 0.42 MHz even though
# USAR never moved.

print()
# Edge cases the formulas pin down:
describe("fully usable", [True] * N_BINS)
describe("nothing usable", [False] * N_BINS)     # LCCB 0, SFI absent
describe("single bin", [False] * 99 + [True])

# The bin-count identity ties the pieces together: total segment length
# always equals USAR * N_b, so LCCB <= USAR * N_b * bin_width with equality
# exactly when one segment holds everything.
rng = np.random.default_rng(4)
row = (rng.random(N_BINS) < 0.6).tolist()
segs = segments(np.asarray(row))
total = sum(L for _, L in segs)
print(f"\nrandom row: sum of segment lengths {total} == "
      f"round(USAR * N_b) {round(sum(row) / N_BINS * N_BINS)}")

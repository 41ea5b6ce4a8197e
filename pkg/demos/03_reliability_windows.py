"""
Scan-windows, support filtering and smoothing
=============================================

Walks one grid cell through the reliability pipeline: window partitioning,
within-window usable fractions, the inclusive eta >= 1 - eps rule, support
minima, and what the 5-bin moving average does to isolated notches.
"""

import numpy as np

from specstruct import (BandConfig, GridConfig, SweepSample,
                        UsabilityThreshold, build_grid, p_usable_map,
                        smooth_mask, window_stats, window_usable)

th = UsabilityThreshold(t6g_dbm=-90.0, delta_db=10.0)
grid = GridConfig()

# One cell, three 60 s windows. Window 2 has a single hot sample.
cell = np.array([
    [5.0, -95.0], [25.0, -96.0], [45.0, -94.0],      # window 0: clean
    [65.0, -95.0], [95.0, -80.0], [115.0, -95.0],    # window 1: 1 of 3 hot
    [125.0, -95.0], [150.0, -95.0],                  # window 2: clean
])
for stat in window_stats(cell, th, grid.window_s):
    print(f"window {stat.window_index}: {stat.sample_count} samples, "
          f"eta = {stat.usable_fraction:.3f}, "
          f"usable(eps=0.05) = {window_usable(stat, 0.05)}")

# Boundary semantics worth remembering: a sample exactly at the threshold is
# NOT usable (strict <), an eta exactly at 1 - eps IS usable (inclusive >=).
(edge,) = window_stats(np.array([[0.0, -90.0]]), th, 60.0)
print(f"\nP == T_6G: usable_count = {edge.usable_count} (strict <)")
(boundary,) = window_stats(
    np.column_stack((np.arange(20.0), [-95.0] * 19 + [-80.0])), th, 1200.0)
print(f"eta = {boundary.usable_fraction} with eps = 0.05: "
      f"usable = {window_usable(boundary, 0.05)} (inclusive)")

# Now a tiny band where bin 2 fails in one of five windows: p_usable = 0.8.
band = BandConfig(low_hz=1.0e9, high_hz=1.0e9 + 5 * 60e3, margin_hz=0.0)
rows = []
for fi in range(5):
    f = band.low_hz + (fi + 0.5) * 60e3
    for k in range(5):
        for j in range(4):
            hot = fi == 2 and k == 0
            rows.append(SweepSample(f, k * 60.0 + j, 5.0,
                                    -80.0 if hot else -95.0))
rmap = p_usable_map(build_grid(rows, band, grid), th, epsilon=0.05)
print(f"\nraw p_usable row:      {np.round(rmap.p_usable[0], 3)}")

# The 5-bin moving average spreads the notch but the re-thresholded mask
# still rejects the volatile bin and its neighbours:
sm = smooth_mask(rmap, width=5)
print(f"smoothed p_usable row: {np.round(sm.smoothed_p[0], 3)}")
print(f"usable mask:           {sm.usable_mask[0]}")

# Support filtering: cells with fewer than two >=2-sample windows never make
# it into the map at all (absent, not zero).
sparse = [SweepSample(band.low_hz + 0.5 * 60e3, 0.0, 55.0, -95.0)]
rmap2 = p_usable_map(build_grid(rows + sparse, band, grid), th)
row55 = np.flatnonzero(rmap2.alt_bins == 5)
print(f"\n1-sample cell at 55 m: present rows {rmap2.alt_bins.tolist()} "
      f"(altitude bin 5 absent: {row55.size == 0})")

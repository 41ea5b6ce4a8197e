"""
Structural metrics over the smoothed reliability state.

Per altitude row of the reliability map (absent cells counting as not
usable):

  usar     fraction of core-band bins whose mask is usable
  segments maximal runs of contiguous usable bins
  lccb     longest run times the bin width, in Hz
  sfi      1 - longest run / total usable bins; 0 for a single segment,
           absent when no bin is usable

A row is emitted only when at least `row_support_fraction` of its core-band
bins have support; sparser rows reflect platform coverage, not spectrum
structure. Extreme-power maps and pooled per-bin power distributions
(nearest-rank median plus CDF knots, margin bins included) come straight
from the sample grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .ingest import BandConfig, SampleGrid
from .noisefloor import nearest_rank
from .reliability import ReliabilityMap

DEFAULT_CDF_LEVELS = (0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0)


@dataclass
class StructuralProfile:
    """Per-altitude availability, contiguity and fragmentation."""

    alt_bins: np.ndarray        # emitted altitude bin indices, ascending
    alt_centers_m: np.ndarray
    usar: np.ndarray
    lccb_hz: np.ndarray
    sfi: np.ndarray             # NaN where no usable bins
    segments: List[List[Tuple[int, int]]] = field(default_factory=list)
    n_core_bins: int = 0

    @property
    def n_segments(self) -> np.ndarray:
        return np.array([len(s) for s in self.segments], dtype=np.int64)


@dataclass
class PowerSummary:
    """Per-cell maximum power plus pooled per-bin distribution summaries.

    p_max covers core-band bins only (NaN where a cell has no samples); the
    distribution block covers every populated bin including the margin.
    """

    alt_bins: np.ndarray
    alt_centers_m: np.ndarray
    p_max: np.ndarray                 # (n_alt, n_core_bins)
    freq_bins: np.ndarray             # populated bin indices incl. margin
    freq_centers_hz: np.ndarray
    median_dbm: np.ndarray
    cdf_levels: np.ndarray
    cdf_knots: np.ndarray             # (n_freq_bins, n_levels)


def segments(mask_row: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal runs of True as (start_bin, length), ordered by start."""
    mask_row = np.asarray(mask_row, dtype=bool)
    runs: List[Tuple[int, int]] = []
    i = 0
    n = mask_row.size
    while i < n:
        if not mask_row[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and mask_row[j + 1]:
            j += 1
        runs.append((i, j - i + 1))
        i = j + 1
    return runs


def lccb(segs: Sequence[Tuple[int, int]], freq_bin_hz: float) -> float:
    """Largest contiguous clean bandwidth in Hz; 0 when nothing is usable."""
    if not segs:
        return 0.0
    return max(length for _, length in segs) * freq_bin_hz


def sfi(segs: Sequence[Tuple[int, int]]) -> Optional[float]:
    """Fragmentation index 1 - max_len/total_len; None when no segments."""
    if not segs:
        return None
    lengths = [length for _, length in segs]
    return 1.0 - max(lengths) / sum(lengths)


def structural_profile(rmap: ReliabilityMap,
                       row_support_fraction: float = 0.5) -> StructuralProfile:
    """USAR/LCCB/SFI per altitude row meeting the row-support rule."""
    if not 0.0 <= row_support_fraction <= 1.0:
        raise ValueError("row_support_fraction must be in [0, 1]")
    n_bins = rmap.n_core_bins
    present = rmap.present

    out_bins: List[int] = []
    out_usar: List[float] = []
    out_lccb: List[float] = []
    out_sfi: List[float] = []
    out_segs: List[List[Tuple[int, int]]] = []
    for r, ai in enumerate(rmap.alt_bins):
        if int(present[r].sum()) / n_bins < row_support_fraction:
            continue
        segs = segments(rmap.usable_mask[r])
        out_bins.append(int(ai))
        out_usar.append(int(rmap.usable_mask[r].sum()) / n_bins)
        out_lccb.append(lccb(segs, rmap.grid.freq_bin_hz))
        s = sfi(segs)
        out_sfi.append(np.nan if s is None else s)
        out_segs.append(segs)

    alt_bins = np.asarray(out_bins, dtype=np.int64)
    return StructuralProfile(
        alt_bins=alt_bins,
        alt_centers_m=(alt_bins + 0.5) * rmap.grid.alt_bin_m,
        usar=np.asarray(out_usar, dtype=np.float64),
        lccb_hz=np.asarray(out_lccb, dtype=np.float64),
        sfi=np.asarray(out_sfi, dtype=np.float64),
        segments=out_segs,
        n_core_bins=n_bins,
    )


def usar(rmap: ReliabilityMap, band: BandConfig,
         row_support_fraction: float = 0.5) -> Tuple[np.ndarray, np.ndarray]:
    """(altitude bin indices, USAR values) for rows meeting the support rule."""
    if (band.low_hz, band.high_hz) != (rmap.band.low_hz, rmap.band.high_hz):
        raise ValueError("band does not match the band the map was built on")
    profile = structural_profile(rmap, row_support_fraction)
    return profile.alt_bins, profile.usar


def pmax_map(grid: SampleGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Per-cell maximum power over the core band.

    Returns (alt_bins, values) with values shaped (n_alt, n_core_bins) and
    NaN where a cell holds no samples.
    """
    n_bins = grid.n_core_bins
    cells = list(grid.core_cells())
    alt_bins = np.array(sorted({ai for (_, ai), _ in cells}), dtype=np.int64)
    row_of = {ai: r for r, ai in enumerate(alt_bins)}
    out = np.full((len(alt_bins), n_bins), np.nan, dtype=np.float64)
    for (fi, ai), cell in cells:
        out[row_of[ai], fi] = float(np.max(cell[:, 1]))
    return alt_bins, out


def power_distribution(grid: SampleGrid,
                       levels: Sequence[float] = DEFAULT_CDF_LEVELS
                       ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pooled per-bin nearest-rank median and CDF knots, margin included.

    Returns (freq_bins, median, knots); knots[i, j] is the levels[j]-quantile
    of every sample in bin freq_bins[i] across time and altitude.
    """
    levels = np.asarray(sorted(levels), dtype=np.float64)
    if levels.size == 0 or levels[0] <= 0.0 or levels[-1] > 1.0:
        raise ValueError("cdf levels must lie in (0, 1]")
    pooled: dict[int, list[np.ndarray]] = {}
    for (fi, _), cell in sorted(grid.cells.items()):
        pooled.setdefault(fi, []).append(cell[:, 1])

    freq_bins = np.array(sorted(pooled), dtype=np.int64)
    median = np.empty(freq_bins.size, dtype=np.float64)
    knots = np.empty((freq_bins.size, levels.size), dtype=np.float64)
    for i, fi in enumerate(freq_bins):
        values = np.concatenate(pooled[int(fi)])
        median[i] = nearest_rank(values, 0.5)
        for j, q in enumerate(levels):
            knots[i, j] = nearest_rank(values, float(q))
    return freq_bins, median, knots


def power_summary(grid: SampleGrid,
                  levels: Sequence[float] = DEFAULT_CDF_LEVELS) -> PowerSummary:
    """P_max map plus distribution summaries in one container."""
    alt_bins, p_max = pmax_map(grid)
    freq_bins, median, knots = power_distribution(grid, levels)
    return PowerSummary(
        alt_bins=alt_bins,
        alt_centers_m=(alt_bins + 0.5) * grid.grid.alt_bin_m,
        p_max=p_max,
        freq_bins=freq_bins,
        freq_centers_hz=grid.band.low_hz + (freq_bins + 0.5) * grid.grid.freq_bin_hz,
        median_dbm=median,
        cdf_levels=np.asarray(sorted(levels), dtype=np.float64),
        cdf_knots=knots,
    )

"""
Scan-window reliability over the (frequency, altitude) grid.

Samples in each core-band cell are partitioned into fixed scan-windows by
absolute alignment, k = floor(time / window_s). Per window the usable
fraction is the share of samples strictly below the usability threshold; a
window is usable when that fraction is >= 1 - epsilon (boundary inclusive).

Support rules (both stated as "at least two samples per dimension"):
  - a window counts toward a cell only if it holds >= min_samples_time samples;
  - a cell enters the map only if it has >= min_samples_freq supported windows.
Cells failing support are absent (NaN), never zero-filled, and a cell's
reliability is the fraction of its supported windows that are usable.

To damp isolated single-bin volatility, a centered moving average over
frequency (default five bins, truncated at band edges, absent cells skipped
and the average renormalized by present-cell count) smooths the reliability
fractions per altitude row; the usable mask is re-thresholded against
1 - epsilon on the smoothed values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List

import numpy as np

from .ingest import BandConfig, DataError, GridConfig, SampleGrid
from .noisefloor import UsabilityThreshold


@dataclass(frozen=True)
class ScanWindowStat:
    """Per-window sample accounting for one grid cell."""

    window_index: int
    sample_count: int
    usable_count: int

    @property
    def usable_fraction(self) -> float:
        return self.usable_count / self.sample_count


@dataclass
class ReliabilityMap:
    """Reliability over core-band bins (columns) by altitude rows.

    Arrays are shaped (n_alt_rows, n_core_bins). p_usable and smoothed_p hold
    NaN where a cell lacks support; usable_mask is False there.
    """

    band: BandConfig
    grid: GridConfig
    epsilon: float
    smooth_width: int
    alt_bins: np.ndarray          # sorted altitude bin indices, one per row
    p_usable: np.ndarray
    supported_windows: np.ndarray  # int, 0 where absent
    smoothed_p: np.ndarray
    usable_mask: np.ndarray

    @property
    def n_core_bins(self) -> int:
        return self.p_usable.shape[1]

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.p_usable)

    @property
    def freq_centers_hz(self) -> np.ndarray:
        idx = np.arange(self.n_core_bins)
        return self.band.low_hz + (idx + 0.5) * self.grid.freq_bin_hz

    @property
    def alt_centers_m(self) -> np.ndarray:
        return (self.alt_bins + 0.5) * self.grid.alt_bin_m


def window_stats(cell: np.ndarray, threshold: UsabilityThreshold,
                 window_s: float) -> List[ScanWindowStat]:
    """Split one time-sorted cell into scan-windows and count usable samples.

    Usable means power strictly below the threshold; a sample exactly at the
    threshold is not usable.
    """
    if len(cell) == 0:
        return []
    times = cell[:, 0]
    powers = cell[:, 1]
    ks = np.floor(times / window_s).astype(np.int64)
    stats: List[ScanWindowStat] = []
    boundaries = np.flatnonzero(ks[1:] != ks[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(ks)]))
    for s0, s1 in zip(starts, ends):
        block = powers[s0:s1]
        stats.append(ScanWindowStat(
            window_index=int(ks[s0]),
            sample_count=int(s1 - s0),
            usable_count=int(np.count_nonzero(block < threshold.t6g_dbm)),
        ))
    return stats


def window_usable(stat: ScanWindowStat, epsilon: float) -> bool:
    """True when the window's usable fraction meets 1 - epsilon (inclusive)."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    return stat.usable_fraction >= 1.0 - epsilon


def p_usable_map(grid: SampleGrid, threshold: UsabilityThreshold,
                 epsilon: float = 0.05) -> ReliabilityMap:
    """Support-filtered reliability per (freq_bin, alt_bin) over the core band.

    The returned map is unsmoothed: smoothed_p mirrors p_usable and the mask
    is thresholded directly (equivalent to a width-1 filter); apply
    smooth_mask for the moving-average variant. Raises DataError when no
    cell anywhere meets the support minima.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    n_bins = grid.n_core_bins
    cfg = grid.grid

    values: dict[tuple[int, int], tuple[float, int]] = {}
    for (fi, ai), cell in grid.core_cells():
        stats = window_stats(cell, threshold, cfg.window_s)
        supported = [s for s in stats if s.sample_count >= cfg.min_samples_time]
        if len(supported) < cfg.min_samples_freq:
            continue
        usable = sum(1 for s in supported if window_usable(s, epsilon))
        values[(fi, ai)] = (usable / len(supported), len(supported))

    if not values:
        raise DataError("insufficient support: no cell meets the support minima")

    alt_bins = np.array(sorted({ai for (_, ai) in values}), dtype=np.int64)
    row_of = {ai: r for r, ai in enumerate(alt_bins)}
    p = np.full((len(alt_bins), n_bins), np.nan, dtype=np.float64)
    nwin = np.zeros((len(alt_bins), n_bins), dtype=np.int64)
    for (fi, ai), (frac, n) in values.items():
        p[row_of[ai], fi] = frac
        nwin[row_of[ai], fi] = n

    return ReliabilityMap(band=grid.band, grid=cfg, epsilon=epsilon,
                          smooth_width=1, alt_bins=alt_bins, p_usable=p,
                          supported_windows=nwin, smoothed_p=p.copy(),
                          usable_mask=_mask_from(p, epsilon))


def smooth_mask(rmap: ReliabilityMap, width: int = 5) -> ReliabilityMap:
    """Frequency-smoothed copy of the map with the mask re-thresholded.

    Per altitude row, each present cell gets the mean of the present cells in
    the centered width-bin window (truncated at the band edges); absent cells
    stay absent.
    """
    if width < 1 or width % 2 == 0:
        raise ValueError(f"width must be a positive odd integer, got {width}")
    smoothed = _moving_average_rows(rmap.p_usable, width)
    return replace(rmap, smooth_width=width, smoothed_p=smoothed,
                   usable_mask=_mask_from(smoothed, rmap.epsilon),
                   p_usable=rmap.p_usable.copy(),
                   supported_windows=rmap.supported_windows.copy(),
                   alt_bins=rmap.alt_bins.copy())


def _mask_from(smoothed_p: np.ndarray, epsilon: float) -> np.ndarray:
    present = ~np.isnan(smoothed_p)
    mask = np.zeros_like(present)
    mask[present] = smoothed_p[present] >= 1.0 - epsilon
    return mask


def _moving_average_rows(p: np.ndarray, width: int) -> np.ndarray:
    """Centered moving average over axis 1, skipping NaN, edges truncated.

    Accumulates shifted copies in ascending offset order so each output is
    the left-to-right sum v[i-h] + ... + v[i+h]; test oracles that loop over
    offsets in that order reproduce it bit for bit.
    """
    half = width // 2
    present = ~np.isnan(p)
    filled = np.where(present, p, 0.0)
    n = p.shape[1]
    total = np.zeros_like(filled)
    count = np.zeros(p.shape, dtype=np.int64)
    for d in range(-half, half + 1):
        if d < 0:
            total[:, -d:] += filled[:, :d]
            count[:, -d:] += present[:, :d]
        elif d == 0:
            total += filled
            count += present
        else:
            total[:, :n - d] += filled[:, d:]
            count[:, :n - d] += present[:, d:]
    out = np.full_like(p, np.nan)
    ok = present & (count > 0)
    out[ok] = total[ok] / count[ok]
    return out

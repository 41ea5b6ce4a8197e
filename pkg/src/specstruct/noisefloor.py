"""
Band noise reference and usability threshold.

The reference is a two-stage robust quantile cascade over the core-band
cells of a SampleGrid, computed directly on dB values:

  1. per frequency bin, pool every sample across time and altitude and take
     a low temporal quantile (default 10th percentile) to suppress
     intermittent interferers;
  2. across bins, take a frequency-domain quantile (default 25th percentile)
     of the per-bin floors to suppress persistently occupied bins.

The scalar result feeds the usability threshold:  threshold = reference + margin,
where the margin (default 10 dB) is a minimum-SNR deployment headroom. A sample
is "usable" when its power is strictly below the threshold; that comparison is
applied downstream, not here.

Quantiles use the nearest-rank rule (no interpolation): on n sorted values the
q-quantile is the element at index ceil(q*n) - 1. Deterministic and robust for
small cells; every test oracle uses the same rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ingest import DataError, SampleGrid


def nearest_rank(values, q: float) -> float:
    """Nearest-rank quantile of a non-empty 1-D collection, no interpolation."""
    arr = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if arr.size == 0:
        raise ValueError("nearest_rank of empty collection")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"quantile must be in (0, 1], got {q}")
    idx = max(math.ceil(q * arr.size), 1) - 1
    return float(arr[idx])


@dataclass(frozen=True)
class NoiseReference:
    """Scalar band noise reference plus per-bin diagnostics.

    per_bin_floor has one entry per core-band frequency bin; NaN marks bins
    excluded for having no samples.
    """

    n_band_dbm: float
    temporal_quantile: float
    frequency_quantile: float
    per_bin_floor: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.temporal_quantile < 1.0 and 0.0 < self.frequency_quantile < 1.0):
            raise ValueError("quantiles must lie in (0, 1)")


@dataclass(frozen=True)
class UsabilityThreshold:
    """Usability threshold in dBm: noise reference plus deployment margin."""

    t6g_dbm: float
    delta_db: float


def per_bin_temporal_floor(grid: SampleGrid, q_time: float = 0.10) -> np.ndarray:
    """Temporal-quantile floor per core-band frequency bin, pooled over altitude.

    Returns an array of length grid.n_core_bins with NaN for bins that hold
    no samples (excluded, flagged by NaN). Raises DataError when every bin
    is empty.
    """
    if not 0.0 < q_time < 1.0:
        raise ValueError(f"q_time must be in (0, 1), got {q_time}")
    n_bins = grid.n_core_bins
    pooled: dict[int, list[np.ndarray]] = {}
    for (fi, _), cell in grid.core_cells():
        pooled.setdefault(fi, []).append(cell[:, 1])

    floors = np.full(n_bins, np.nan, dtype=np.float64)
    for fi, chunks in pooled.items():
        floors[fi] = nearest_rank(np.concatenate(chunks), q_time)
    if np.all(np.isnan(floors)):
        raise DataError("all frequency bins empty; cannot estimate noise reference")
    return floors


def band_noise_reference(per_bin: np.ndarray, q_freq: float = 0.25,
                         q_time: float = 0.10) -> NoiseReference:
    """Frequency-domain quantile of the per-bin floors (NaN bins excluded)."""
    per_bin = np.asarray(per_bin, dtype=np.float64)
    present = per_bin[~np.isnan(per_bin)]
    if present.size == 0:
        raise DataError("no populated frequency bins")
    n_band = nearest_rank(present, q_freq)
    return NoiseReference(n_band_dbm=n_band, temporal_quantile=q_time,
                          frequency_quantile=q_freq, per_bin_floor=per_bin)


def threshold(nr: NoiseReference, delta_db: float = 10.0) -> UsabilityThreshold:
    """Usability threshold t6g = reference + margin (exact dB addition)."""
    if delta_db < 0:
        raise ValueError("delta_db must be >= 0")
    return UsabilityThreshold(t6g_dbm=nr.n_band_dbm + delta_db, delta_db=delta_db)


def noise_reference(grid: SampleGrid, q_time: float = 0.10,
                    q_freq: float = 0.25) -> NoiseReference:
    """Convenience: both quantile stages in one call."""
    return band_noise_reference(per_bin_temporal_floor(grid, q_time),
                                q_freq=q_freq, q_time=q_time)

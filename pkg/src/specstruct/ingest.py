"""
Ingestion of wideband sweep measurements into a frequency x altitude x time grid.

Input format
------------
CSV with a header row plus a JSON "schema sidecar" that names the four
required columns and their units:

    {
      "columns": {"frequency": "freq_mhz", "time": "t_s",
                  "altitude": "alt", "power": "p"},
      "units":   {"frequency": "MHz", "time": "s",
                  "altitude": "m", "power": "dBm"}
    }

Accepted units: frequency Hz/kHz/MHz/GHz, time s/ms, altitude m, power dBm.
Rows with non-finite power, non-positive frequency, negative altitude or
unparseable fields are rejected (logged, counted), never silently dropped.

Gridding
--------
Samples are bucketed into half-open frequency bins anchored at the band's
lower edge and altitude bins anchored at 0 m:

    freq_bin  = floor((freq_hz - band.low_hz) / grid.freq_bin_hz)
    alt_bin   = floor(alt_m / grid.alt_bin_m)

Core-band bins carry indices 0 .. n_core_bins-1; samples inside the optional
symmetric margin get negative indices (below band) or indices >= n_core_bins
(above band). Margin bins feed power-distribution summaries only. Within each
cell, samples are sorted ascending by (time, power), which makes the grid
independent of input row order and of how parallel-parsed files are merged.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

log = logging.getLogger(__name__)


class ConfigError(Exception):
    """Bad configuration: missing columns, invalid parameters, unreadable files."""


class DataError(Exception):
    """Valid configuration but the data cannot support the analysis."""


UNIT_SCALE = {
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    "GHz": 1e9,
    "s": 1.0,
    "ms": 1e-3,
    "m": 1.0,
    "dBm": 1.0,
}

FIELD_UNITS = {
    "frequency": ("Hz", "kHz", "MHz", "GHz"),
    "time": ("s", "ms"),
    "altitude": ("m",),
    "power": ("dBm",),
}


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSample:
    """One calibrated power observation at (frequency, time, altitude)."""

    freq_hz: float
    time_s: float
    alt_m: float
    power_dbm: float


@dataclass(frozen=True)
class BandConfig:
    """Analysis band edges plus an optional symmetric margin for summaries."""

    low_hz: float
    high_hz: float
    margin_hz: float = 50e6
    label: str = ""

    def __post_init__(self):
        if not (self.low_hz < self.high_hz):
            raise ConfigError(f"band low {self.low_hz} must be < high {self.high_hz}")
        if self.margin_hz < 0:
            raise ConfigError("margin_hz must be >= 0")

    @property
    def span_hz(self) -> float:
        return self.high_hz - self.low_hz


@dataclass(frozen=True)
class GridConfig:
    """Bin widths, scan-window duration and minimum support counts."""

    freq_bin_hz: float = 60e3
    alt_bin_m: float = 10.0
    window_s: float = 60.0
    min_samples_time: int = 2
    min_samples_freq: int = 2

    def __post_init__(self):
        for name in ("freq_bin_hz", "alt_bin_m", "window_s"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("min_samples_time", "min_samples_freq"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")


@dataclass
class ColumnSchema:
    """Maps the four required logical columns onto CSV column names + units."""

    columns: Dict[str, str]
    units: Dict[str, str]

    def __post_init__(self):
        for key in ("frequency", "time", "altitude", "power"):
            if key not in self.columns:
                raise ConfigError(f"schema missing column mapping for '{key}'")
            unit = self.units.get(key)
            if unit not in FIELD_UNITS[key]:
                raise ConfigError(
                    f"schema unit for '{key}' must be one of {FIELD_UNITS[key]}, got {unit!r}"
                )

    @classmethod
    def from_json(cls, path) -> "ColumnSchema":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"schema file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        if "columns" not in raw or "units" not in raw:
            raise ConfigError(f"schema file {path} must contain 'columns' and 'units'")
        return cls(columns=dict(raw["columns"]), units=dict(raw["units"]))

    def to_json(self, path) -> None:
        payload = {"columns": self.columns, "units": self.units}
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def scale(self, key: str) -> float:
        return UNIT_SCALE[self.units[key]]


#: Canonical schema for CSVs written by this package (synth fixtures, exports).
NATIVE_SCHEMA = ColumnSchema(
    columns={
        "frequency": "freq_hz",
        "time": "time_s",
        "altitude": "alt_m",
        "power": "power_dbm",
    },
    units={"frequency": "Hz", "time": "s", "altitude": "m", "power": "dBm"},
)


@dataclass
class IngestStats:
    """Row accounting for one or more parsed files."""

    rows_read: int = 0
    rows_yielded: int = 0
    rows_rejected: int = 0
    reject_reasons: Counter = field(default_factory=Counter)

    def reject(self, reason: str) -> None:
        self.rows_rejected += 1
        self.reject_reasons[reason] += 1


@dataclass
class SampleGrid:
    """Samples bucketed into (freq_bin, alt_bin) cells, time-sorted per cell.

    cells maps (freq_bin, alt_bin) -> ndarray of shape (n, 2) with columns
    (time_s, power_dbm), sorted ascending by (time, power).
    """

    band: BandConfig
    grid: GridConfig
    cells: Dict[Tuple[int, int], np.ndarray]
    n_samples: int = 0
    n_out_of_band: int = 0

    @property
    def n_core_bins(self) -> int:
        """Number of frequency bins covering [low_hz, high_hz)."""
        return int(math.ceil(self.band.span_hz / self.grid.freq_bin_hz))

    def freq_center_hz(self, freq_bin: int) -> float:
        return self.band.low_hz + (freq_bin + 0.5) * self.grid.freq_bin_hz

    def alt_center_m(self, alt_bin: int) -> float:
        return (alt_bin + 0.5) * self.grid.alt_bin_m

    def alt_bins(self) -> List[int]:
        """Sorted altitude bin indices that hold at least one sample."""
        return sorted({ai for (_, ai) in self.cells})

    def core_cells(self) -> Iterator[Tuple[Tuple[int, int], np.ndarray]]:
        """Cells whose frequency bin lies inside the core band."""
        n = self.n_core_bins
        for key in sorted(self.cells):
            if 0 <= key[0] < n:
                yield key, self.cells[key]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def parse_sweep_file(path, schema: ColumnSchema,
                     stats: Optional[IngestStats] = None) -> Iterator[SweepSample]:
    """Stream validated SweepSamples from a CSV file.

    Rejected rows are logged at DEBUG and tallied in `stats` (if given);
    a missing column raises ConfigError up front.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"input file not found: {path}")
    if stats is None:
        stats = IngestStats()

    f_scale = schema.scale("frequency")
    t_scale = schema.scale("time")
    a_scale = schema.scale("altitude")

    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            log.warning("empty file (no header): %s", path)
            return
        header = [name.strip() for name in reader.fieldnames]
        for key in ("frequency", "time", "altitude", "power"):
            if schema.columns[key] not in header:
                raise ConfigError(
                    f"{path}: missing column '{schema.columns[key]}' (for {key}); "
                    f"header has {header}"
                )

        any_row = False
        for row in reader:
            any_row = True
            stats.rows_read += 1
            try:
                freq = float(row[schema.columns["frequency"]]) * f_scale
                time = float(row[schema.columns["time"]]) * t_scale
                alt = float(row[schema.columns["altitude"]]) * a_scale
                power = float(row[schema.columns["power"]])
            except (TypeError, ValueError, KeyError):
                stats.reject("unparseable field")
                log.debug("%s row %d rejected: unparseable field", path, stats.rows_read)
                continue
            if not math.isfinite(power):
                stats.reject("non-finite power")
                log.debug("%s row %d rejected: non-finite power", path, stats.rows_read)
                continue
            if not (math.isfinite(freq) and freq > 0):
                stats.reject("non-positive frequency")
                log.debug("%s row %d rejected: non-positive frequency", path, stats.rows_read)
                continue
            if not math.isfinite(time):
                stats.reject("non-finite time")
                log.debug("%s row %d rejected: non-finite time", path, stats.rows_read)
                continue
            if not (math.isfinite(alt) and alt >= 0):
                stats.reject("negative altitude")
                log.debug("%s row %d rejected: negative altitude", path, stats.rows_read)
                continue
            stats.rows_yielded += 1
            yield SweepSample(freq_hz=freq, time_s=time, alt_m=alt, power_dbm=power)

        if not any_row:
            log.warning("empty file (header only): %s", path)


def build_grid(samples: Iterable[SweepSample], band: BandConfig,
               grid: GridConfig) -> SampleGrid:
    """Bucket samples into the (freq_bin, alt_bin) grid over band +/- margin.

    Samples outside [low - margin, high + margin) are discarded and counted.
    The input may be a concatenation of independently parsed files; the
    result does not depend on input order. Raises DataError when no sample
    falls inside the extended band.
    """
    freqs: List[float] = []
    times: List[float] = []
    alts: List[float] = []
    powers: List[float] = []
    for s in samples:
        freqs.append(s.freq_hz)
        times.append(s.time_s)
        alts.append(s.alt_m)
        powers.append(s.power_dbm)

    freq_a = np.asarray(freqs, dtype=np.float64)
    time_a = np.asarray(times, dtype=np.float64)
    alt_a = np.asarray(alts, dtype=np.float64)
    power_a = np.asarray(powers, dtype=np.float64)

    lo = band.low_hz - band.margin_hz
    hi = band.high_hz + band.margin_hz
    in_band = (freq_a >= lo) & (freq_a < hi)
    n_total = freq_a.size
    n_out = int(n_total - np.count_nonzero(in_band))
    if n_total - n_out == 0:
        raise DataError(f"empty band: no samples inside [{lo}, {hi}) Hz")

    freq_a = freq_a[in_band]
    time_a = time_a[in_band]
    alt_a = alt_a[in_band]
    power_a = power_a[in_band]

    fbin = np.floor((freq_a - band.low_hz) / grid.freq_bin_hz).astype(np.int64)
    abin = np.floor(alt_a / grid.alt_bin_m).astype(np.int64)

    # One lexsort pass gives per-cell (time, power)-ordered blocks.
    order = np.lexsort((power_a, time_a, abin, fbin))
    fbin, abin = fbin[order], abin[order]
    payload = np.column_stack((time_a[order], power_a[order]))

    cells: Dict[Tuple[int, int], np.ndarray] = {}
    keys = np.column_stack((fbin, abin))
    boundaries = np.flatnonzero(np.any(keys[1:] != keys[:-1], axis=1)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(keys)]))
    for s0, s1 in zip(starts, ends):
        cells[(int(fbin[s0]), int(abin[s0]))] = payload[s0:s1]

    return SampleGrid(band=band, grid=grid, cells=cells,
                      n_samples=int(n_total - n_out), n_out_of_band=n_out)


def cell_support(cell: np.ndarray, window_s: float) -> Tuple[int, int]:
    """(sample count, distinct scan-window count) for one grid cell."""
    if cell is None or len(cell) == 0:
        return 0, 0
    windows = np.floor(cell[:, 0] / window_s).astype(np.int64)
    return int(len(cell)), int(np.unique(windows).size)

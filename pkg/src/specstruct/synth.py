"""
Synthetic spectrum environments with known ground truth.

A scenario is a flat noise floor with uniform dB jitter plus a list of
emitters (persistent or pulsed narrowband blocks, optionally with
per-altitude gain offsets). Generation is fully seeded: the same spec
produces a bit-identical sample stream. Emitter on/off phase is
deterministic (on during the first duty_cycle fraction of every period,
starting at t = 0), so contaminated scan-windows are computable in closed
form from the geometry.

Emitter power combines with the noise draw by max in the dB domain. That
keeps threshold reasoning exact: a sample is above a threshold T iff its
noise draw or an active emitter level is.

The module also carries `oracle_metrics`, a deliberately naive pure-Python
transcription of the whole metric chain (noise reference, threshold,
window fractions, reliability, smoothing, USAR/LCCB/SFI, P_max). It shares
no code with the main pipeline and exists only so tests can demand exact
agreement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ingest import (BandConfig, DataError, GridConfig, NATIVE_SCHEMA,
                     SweepSample)


@dataclass(frozen=True)
class Emitter:
    """One synthetic interferer occupying a frequency block."""

    center_hz: float
    width_hz: float
    power_dbm: float
    duty_cycle: float = 1.0
    period_s: float = 60.0
    altitude_gain_db: Optional[Tuple[float, ...]] = None  # aligned with altitudes_m

    def __post_init__(self):
        if self.width_hz <= 0:
            raise ValueError("emitter width_hz must be positive")
        if not 0.0 <= self.duty_cycle <= 1.0:
            raise ValueError("duty_cycle must be in [0, 1]")
        if self.period_s <= 0:
            raise ValueError("period_s must be positive")

    def active(self, t: float) -> bool:
        if self.duty_cycle >= 1.0:
            return True
        if self.duty_cycle <= 0.0:
            return False
        return (t % self.period_s) < self.duty_cycle * self.period_s

    def covers(self, bin_low_hz: float, bin_high_hz: float) -> bool:
        lo = self.center_hz - self.width_hz / 2.0
        hi = self.center_hz + self.width_hz / 2.0
        return bin_low_hz < hi and bin_high_hz > lo


@dataclass
class ScenarioSpec:
    """Seeded description of a synthetic measurement campaign."""

    noise_floor_dbm: float = -100.0
    jitter_db: float = 1.0
    emitters: List[Emitter] = field(default_factory=list)
    duration_s: float = 300.0
    sample_rate_hz: float = 0.1        # samples per second per cell
    rng_seed: int = 0
    altitudes_m: Tuple[float, ...] = (5.0,)

    def __post_init__(self):
        if self.jitter_db < 0:
            raise ValueError("jitter_db must be >= 0")
        if self.duration_s <= 0 or self.sample_rate_hz <= 0:
            raise ValueError("duration_s and sample_rate_hz must be positive")
        if not self.altitudes_m:
            raise ValueError("altitudes_m must not be empty")
        for e in self.emitters:
            if e.altitude_gain_db is not None and len(e.altitude_gain_db) != len(self.altitudes_m):
                raise ValueError("altitude_gain_db must align with altitudes_m")

    @classmethod
    def from_json(cls, path) -> "ScenarioSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioSpec":
        emitters = [
            Emitter(
                center_hz=e["center_hz"],
                width_hz=e["width_hz"],
                power_dbm=e["power_dbm"],
                duty_cycle=e.get("duty_cycle", 1.0),
                period_s=e.get("period_s", 60.0),
                altitude_gain_db=(tuple(e["altitude_gain_db"])
                                  if e.get("altitude_gain_db") is not None else None),
            )
            for e in raw.get("emitters", [])
        ]
        return cls(
            noise_floor_dbm=raw.get("noise_floor_dbm", -100.0),
            jitter_db=raw.get("jitter_db", 1.0),
            emitters=emitters,
            duration_s=raw.get("duration_s", 300.0),
            sample_rate_hz=raw.get("sample_rate_hz", 0.1),
            rng_seed=raw.get("rng_seed", 0),
            altitudes_m=tuple(raw.get("altitudes_m", (5.0,))),
        )

    def to_json(self, path) -> None:
        payload = {
            "noise_floor_dbm": self.noise_floor_dbm,
            "jitter_db": self.jitter_db,
            "emitters": [
                {
                    "center_hz": e.center_hz,
                    "width_hz": e.width_hz,
                    "power_dbm": e.power_dbm,
                    "duty_cycle": e.duty_cycle,
                    "period_s": e.period_s,
                    "altitude_gain_db": (list(e.altitude_gain_db)
                                         if e.altitude_gain_db is not None else None),
                }
                for e in self.emitters
            ],
            "duration_s": self.duration_s,
            "sample_rate_hz": self.sample_rate_hz,
            "rng_seed": self.rng_seed,
            "altitudes_m": list(self.altitudes_m),
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass
class GroundTruth:
    """Exact per-cell truth recorded during generation.

    cell_truth maps (freq_bin, alt_bin) -> ndarray (n, 3) of
    (time_s, power_dbm, contaminated flag); a sample is contaminated when at
    least one emitter was on for its bin at its timestamp, regardless of
    level.
    """

    band: BandConfig
    grid: GridConfig
    cell_truth: Dict[Tuple[int, int], np.ndarray]
    emitter_bins: List[List[int]]

    def contaminated_windows(self, freq_bin: int, alt_bin: int) -> List[int]:
        """Scan-window indices holding at least one contaminated sample."""
        cell = self.cell_truth.get((freq_bin, alt_bin))
        if cell is None:
            return []
        hit = cell[cell[:, 2] > 0]
        if hit.size == 0:
            return []
        return sorted({int(math.floor(t / self.grid.window_s)) for t in hit[:, 0]})

    def all_contaminated_windows(self) -> Dict[Tuple[int, int], List[int]]:
        out = {}
        for key in sorted(self.cell_truth):
            ws = self.contaminated_windows(*key)
            if ws:
                out[key] = ws
        return out

    def expected_usable_mask(self, t6g_dbm: float,
                             epsilon: float = 0.05) -> Dict[Tuple[int, int], bool]:
        """Pre-smoothing usable verdict per supported cell under a threshold."""
        out: Dict[Tuple[int, int], bool] = {}
        for key, cell in self.cell_truth.items():
            windows: Dict[int, List[float]] = {}
            for t, p, _ in cell:
                windows.setdefault(math.floor(t / self.grid.window_s), []).append(p)
            supported = [v for v in windows.values()
                         if len(v) >= self.grid.min_samples_time]
            if len(supported) < self.grid.min_samples_freq:
                continue
            usable = sum(
                1 for v in supported
                if sum(1 for p in v if p < t6g_dbm) / len(v) >= 1.0 - epsilon
            )
            out[key] = usable / len(supported) >= 1.0 - epsilon
        return out


def _extended_bins(band: BandConfig, grid: GridConfig) -> List[int]:
    """Bin indices whose centers fall inside band +/- margin."""
    lo = band.low_hz - band.margin_hz
    hi = band.high_hz + band.margin_hz
    first = math.floor((lo - band.low_hz) / grid.freq_bin_hz) - 1
    last = math.ceil((hi - band.low_hz) / grid.freq_bin_hz) + 1
    out = []
    for i in range(first, last + 1):
        center = band.low_hz + (i + 0.5) * grid.freq_bin_hz
        if lo <= center < hi:
            out.append(i)
    return out


def generate(spec: ScenarioSpec, band: BandConfig,
             grid: GridConfig) -> Tuple[List[SweepSample], GroundTruth]:
    """Draw one deterministic sample stream plus its ground truth.

    Every extended-band bin center is observed at every altitude on a common
    time base t_j = j / sample_rate; noise jitter is uniform in dB.
    """
    rng = np.random.default_rng(spec.rng_seed)
    bins = _extended_bins(band, grid)
    n_times = int(math.floor(spec.duration_s * spec.sample_rate_hz))
    if n_times == 0:
        raise ValueError("duration_s * sample_rate_hz must yield at least one sample")
    times = np.arange(n_times, dtype=np.float64) / spec.sample_rate_hz

    emitter_bins: List[List[int]] = []
    for e in spec.emitters:
        hit = [i for i in bins
               if e.covers(band.low_hz + i * grid.freq_bin_hz,
                           band.low_hz + (i + 1) * grid.freq_bin_hz)]
        emitter_bins.append(hit)
    bin_emitters = {i: [(ei, e) for ei, (e, hit) in
                        enumerate(zip(spec.emitters, emitter_bins)) if i in set(hit)]
                    for i in bins}

    samples: List[SweepSample] = []
    cell_truth: Dict[Tuple[int, int], np.ndarray] = {}
    for ai, alt in enumerate(spec.altitudes_m):
        alt_bin = int(math.floor(alt / grid.alt_bin_m))
        for i in bins:
            center = band.low_hz + (i + 0.5) * grid.freq_bin_hz
            jitter = rng.uniform(-spec.jitter_db, spec.jitter_db, size=n_times)
            rows = np.empty((n_times, 3), dtype=np.float64)
            for j, t in enumerate(times):
                power = spec.noise_floor_dbm + jitter[j]
                contaminated = 0.0
                for _, e in bin_emitters[i]:
                    if e.active(t):
                        gain = e.altitude_gain_db[ai] if e.altitude_gain_db else 0.0
                        power = max(power, e.power_dbm + gain)
                        contaminated = 1.0
                rows[j] = (t, power, contaminated)
                samples.append(SweepSample(freq_hz=center, time_s=float(t),
                                           alt_m=alt, power_dbm=float(power)))
            key = (i, alt_bin)
            cell_truth[key] = (np.vstack((cell_truth[key], rows))
                               if key in cell_truth else rows)

    return samples, GroundTruth(band=band, grid=grid, cell_truth=cell_truth,
                                emitter_bins=emitter_bins)


def samples_to_csv(samples: Sequence[SweepSample], path,
                   write_schema: bool = True) -> Path:
    """Write samples in the native ingest CSV schema (plus sidecar).

    Floats use repr, so re-ingesting reproduces the exact sample values.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("freq_hz,time_s,alt_m,power_dbm\n")
        for s in samples:
            fh.write(f"{s.freq_hz!r},{s.time_s!r},{s.alt_m!r},{s.power_dbm!r}\n")
    if write_schema:
        NATIVE_SCHEMA.to_json(path.with_suffix(".schema.json"))
    return path


# ---------------------------------------------------------------------------
# Naive oracle: literal formula transcription, test use only
# ---------------------------------------------------------------------------

@dataclass
class OracleResult:
    """Everything the naive chain produces, keyed by (freq_bin, alt_bin)."""

    n_band_dbm: float
    t6g_dbm: float
    p_usable: Dict[Tuple[int, int], float]
    supported_windows: Dict[Tuple[int, int], int]
    smoothed_p: Dict[Tuple[int, int], float]
    usable: Dict[Tuple[int, int], bool]
    rows: List[Tuple[int, float, float, Optional[float], List[Tuple[int, int]]]]
    pmax: Dict[Tuple[int, int], float]


def _oracle_rank(sorted_vals: List[float], q: float) -> float:
    return sorted_vals[max(math.ceil(q * len(sorted_vals)), 1) - 1]


def oracle_metrics(samples: Sequence[SweepSample], band: BandConfig,
                   grid: GridConfig, q_time: float = 0.10, q_freq: float = 0.25,
                   delta_db: float = 10.0, epsilon: float = 0.05,
                   smooth_width: int = 5,
                   row_support_fraction: float = 0.5) -> OracleResult:
    """Recompute the full metric chain with plain loops and dicts.

    Intended for instances up to ~1e5 samples. Raises the same DataErrors as
    the pipeline on empty or unsupported inputs.
    """
    lo = band.low_hz - band.margin_hz
    hi = band.high_hz + band.margin_hz
    nb = math.ceil((band.high_hz - band.low_hz) / grid.freq_bin_hz)

    cells: Dict[Tuple[int, int], List[Tuple[float, float]]] = {}
    kept = 0
    for s in samples:
        if not (s.freq_hz >= lo and s.freq_hz < hi):
            continue
        kept += 1
        fi = math.floor((s.freq_hz - band.low_hz) / grid.freq_bin_hz)
        ai = math.floor(s.alt_m / grid.alt_bin_m)
        cells.setdefault((fi, ai), []).append((s.time_s, s.power_dbm))
    if kept == 0:
        raise DataError("empty band")

    core = {key: val for key, val in cells.items() if 0 <= key[0] < nb}

    # noise reference: temporal quantile per bin, then frequency quantile
    per_bin: Dict[int, List[float]] = {}
    for (fi, _), vals in core.items():
        per_bin.setdefault(fi, []).extend(p for _, p in vals)
    if not per_bin:
        raise DataError("all frequency bins empty")
    floors = [_oracle_rank(sorted(per_bin[fi]), q_time) for fi in sorted(per_bin)]
    n_band = _oracle_rank(sorted(floors), q_freq)
    t6g = n_band + delta_db

    # scan-window reliability with support filtering
    p_usable: Dict[Tuple[int, int], float] = {}
    nwin: Dict[Tuple[int, int], int] = {}
    for key, vals in core.items():
        windows: Dict[int, List[float]] = {}
        for t, p in vals:
            windows.setdefault(math.floor(t / grid.window_s), []).append(p)
        supported = [v for v in windows.values() if len(v) >= grid.min_samples_time]
        if len(supported) < grid.min_samples_freq:
            continue
        usable_windows = 0
        for v in supported:
            eta = sum(1 for p in v if p < t6g) / len(v)
            if eta >= 1.0 - epsilon:
                usable_windows += 1
        p_usable[key] = usable_windows / len(supported)
        nwin[key] = len(supported)
    if not p_usable:
        raise DataError("insufficient support")

    # per-row moving average over frequency, absent bins skipped
    half = smooth_width // 2
    alt_rows = sorted({ai for (_, ai) in p_usable})
    smoothed: Dict[Tuple[int, int], float] = {}
    for ai in alt_rows:
        for fi in range(nb):
            if (fi, ai) not in p_usable:
                continue
            total = 0.0
            count = 0
            for j in range(fi - half, fi + half + 1):
                if 0 <= j < nb and (j, ai) in p_usable:
                    total += p_usable[(j, ai)]
                    count += 1
            smoothed[(fi, ai)] = total / count
    usable = {key: val >= 1.0 - epsilon for key, val in smoothed.items()}

    # structural metrics per altitude row passing the support rule
    rows: List[Tuple[int, float, float, Optional[float], List[Tuple[int, int]]]] = []
    for ai in alt_rows:
        present = sum(1 for fi in range(nb) if (fi, ai) in p_usable)
        if present / nb < row_support_fraction:
            continue
        mask = [usable.get((fi, ai), False) for fi in range(nb)]
        segs: List[Tuple[int, int]] = []
        i = 0
        while i < nb:
            if not mask[i]:
                i += 1
                continue
            j = i
            while j + 1 < nb and mask[j + 1]:
                j += 1
            segs.append((i, j - i + 1))
            i = j + 1
        usar_val = sum(1 for m in mask if m) / nb
        lccb_val = max((length for _, length in segs), default=0) * grid.freq_bin_hz
        if segs:
            lengths = [length for _, length in segs]
            sfi_val: Optional[float] = 1.0 - max(lengths) / sum(lengths)
        else:
            sfi_val = None
        rows.append((ai, usar_val, lccb_val, sfi_val, segs))

    pmax = {key: max(p for _, p in vals) for key, vals in core.items()}

    return OracleResult(n_band_dbm=n_band, t6g_dbm=t6g, p_usable=p_usable,
                        supported_windows=nwin, smoothed_p=smoothed,
                        usable=usable, rows=rows, pmax=pmax)

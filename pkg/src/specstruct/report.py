"""
Plot-ready serialization of maps, profiles and distribution summaries.

All files are long-format CSV with '#' comment lines documenting units,
a fixed column order, deterministic row ordering (frequency ascending,
then altitude ascending) and floats printed at 6 significant digits, so
reports built from identical inputs are byte-identical. Absent cells are
omitted from grid files; an absent fragmentation value is an empty field,
never 0. The JSON overview bundles metadata, the config echo and headline
numbers. Formats are documented in docs/formats.md.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .ingest import BandConfig, GridConfig
from .noisefloor import NoiseReference, UsabilityThreshold
from .reliability import ReliabilityMap
from .structure import PowerSummary, StructuralProfile


def fmt(x) -> str:
    """Canonical 6-significant-digit float form shared by every writer."""
    return f"{float(x):.6g}"


@dataclass
class AnalysisReport:
    """One band-campaign analysis, ready to serialize."""

    campaign: str
    band: BandConfig
    grid: GridConfig
    noise: NoiseReference
    threshold: UsabilityThreshold
    rmap: ReliabilityMap
    profile: StructuralProfile
    power: PowerSummary
    config_echo: Dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def write_grid_csv(freq_centers_hz: np.ndarray, alt_centers_m: np.ndarray,
                   values: np.ndarray, path, value_name: str,
                   value_unit: str) -> Path:
    """Long-format (freq, alt, value) CSV; NaN cells omitted.

    `values` is shaped (n_alt, n_freq); rows come out ordered by frequency
    then altitude.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# columns: freq_hz [Hz], alt_m [m], {value_name} [{value_unit}]\n")
        fh.write(f"freq_hz,alt_m,{value_name}\n")
        for fi in range(values.shape[1]):
            for r in range(values.shape[0]):
                v = values[r, fi]
                if math.isnan(v):
                    continue
                fh.write(f"{fmt(freq_centers_hz[fi])},{fmt(alt_centers_m[r])},{fmt(v)}\n")
    return path


def read_grid_csv(path) -> List[Tuple[float, float, float]]:
    """Rows of a grid CSV as (freq_hz, alt_m, value) tuples."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("freq_hz"):
                continue
            f, a, v = line.split(",")
            rows.append((float(f), float(a), float(v)))
    return rows


def write_profile_csv(profile: StructuralProfile, path) -> Path:
    """Per-altitude structural metrics; absent SFI becomes an empty field."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# columns: alt_m [m], usar [fraction], lccb_hz [Hz], "
                 "sfi [fraction, empty when no usable bins], n_segments [count]\n")
        fh.write("alt_m,usar,lccb_hz,sfi,n_segments\n")
        for r in range(profile.alt_bins.size):
            s = profile.sfi[r]
            sfi_field = "" if math.isnan(s) else fmt(s)
            fh.write(f"{fmt(profile.alt_centers_m[r])},{fmt(profile.usar[r])},"
                     f"{fmt(profile.lccb_hz[r])},{sfi_field},"
                     f"{len(profile.segments[r])}\n")
    return path


def read_profile_csv(path) -> List[Dict[str, Optional[float]]]:
    """Profile rows as dicts; absent SFI comes back as None."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("alt_m"):
                continue
            alt, usar, lccb, sfi, nseg = line.split(",")
            rows.append({
                "alt_m": float(alt),
                "usar": float(usar),
                "lccb_hz": float(lccb),
                "sfi": None if sfi == "" else float(sfi),
                "n_segments": int(nseg),
            })
    return rows


def write_distribution_csv(power: PowerSummary, path) -> Path:
    """Per-bin CDF knots plus the nearest-rank median, margin bins included."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# columns: freq_hz [Hz], quantile_level [fraction], "
                 "power_dbm [dBm], median_dbm [dBm]\n")
        fh.write("freq_hz,quantile_level,power_dbm,median_dbm\n")
        for i in range(power.freq_bins.size):
            for j in range(power.cdf_levels.size):
                fh.write(f"{fmt(power.freq_centers_hz[i])},{fmt(power.cdf_levels[j])},"
                         f"{fmt(power.cdf_knots[i, j])},{fmt(power.median_dbm[i])}\n")
    return path


def write_report(report: AnalysisReport, out_dir) -> Path:
    """Write the full report tree for one band-campaign into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rmap = report.rmap
    write_grid_csv(rmap.freq_centers_hz, rmap.alt_centers_m, rmap.p_usable,
                   out_dir / "p_usable.csv", "p_usable", "fraction")
    write_grid_csv(rmap.freq_centers_hz, rmap.alt_centers_m, rmap.smoothed_p,
                   out_dir / "p_usable_smoothed.csv", "p_usable_smoothed", "fraction")
    write_grid_csv(rmap.freq_centers_hz, report.power.alt_centers_m,
                   report.power.p_max, out_dir / "p_max.csv", "p_max_dbm", "dBm")
    write_profile_csv(report.profile, out_dir / "profile.csv")
    write_distribution_csv(report.power, out_dir / "distribution.csv")

    overview = {
        "campaign": report.campaign,
        "band": {
            "label": report.band.label,
            "low_hz": report.band.low_hz,
            "high_hz": report.band.high_hz,
            "margin_hz": report.band.margin_hz,
            "n_core_bins": report.profile.n_core_bins,
        },
        "n_band_dbm": report.noise.n_band_dbm,
        "t6g_dbm": report.threshold.t6g_dbm,
        "delta_db": report.threshold.delta_db,
        "epsilon": rmap.epsilon,
        "smooth_width": rmap.smooth_width,
        "grid": {
            "freq_bin_hz": report.grid.freq_bin_hz,
            "alt_bin_m": report.grid.alt_bin_m,
            "window_s": report.grid.window_s,
            "min_samples_time": report.grid.min_samples_time,
            "min_samples_freq": report.grid.min_samples_freq,
        },
        "summary": _summary_numbers(report.profile),
        "config_echo": report.config_echo,
    }
    with open(out_dir / "overview.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(overview, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out_dir


def _summary_numbers(profile: StructuralProfile) -> Dict:
    if profile.alt_bins.size == 0:
        return {"n_altitude_rows": 0}
    sfi_vals = profile.sfi[~np.isnan(profile.sfi)]
    return {
        "n_altitude_rows": int(profile.alt_bins.size),
        "alt_min_m": float(profile.alt_centers_m[0]),
        "alt_max_m": float(profile.alt_centers_m[-1]),
        "usar_min": float(profile.usar.min()),
        "usar_max": float(profile.usar.max()),
        "lccb_max_hz": float(profile.lccb_hz.max()),
        "sfi_max": (float(sfi_vals.max()) if sfi_vals.size else None),
    }


def read_overview(report_dir) -> Dict:
    with open(Path(report_dir) / "overview.json", encoding="utf-8") as fh:
        return json.load(fh)

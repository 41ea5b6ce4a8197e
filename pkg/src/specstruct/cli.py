"""
Command-line front door: reproducible runs from a JSON config.

    specstruct analyze --config run.json [--out DIR]
    specstruct synth   --scenario s.json --out data.csv
    specstruct compare --a reportA/ --b reportB/

Exit codes: 0 success, 1 configuration error, 2 data error (empty band,
insufficient support). Logs go to stderr; report data goes to files; the
one-screen run summary goes to stdout. Bands in one run share a single
ingestion pass and may be analyzed in parallel (SPECSTRUCT_WORKERS).

Config defaults match the measurement conventions: 60 kHz frequency bins,
60 s scan-windows, 10 m altitude bins, 10/25 percent noise quantiles,
10 dB margin, epsilon 0.05, 5-bin smoothing, 2-sample support minima.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .ingest import (BandConfig, ColumnSchema, ConfigError, DataError,
                     GridConfig, IngestStats, SweepSample, build_grid,
                     parse_sweep_file)
from .noisefloor import noise_reference, threshold
from .reliability import p_usable_map, smooth_mask
from .report import (AnalysisReport, read_overview, read_profile_csv,
                     write_report)
from .structure import (DEFAULT_CDF_LEVELS, power_summary, structural_profile)
from .synth import ScenarioSpec, generate, samples_to_csv

log = logging.getLogger(__name__)

WORKERS_ENV = "SPECSTRUCT_WORKERS"


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Everything one analysis run needs; defaults carry the standard values."""

    campaign: str
    inputs: List[Dict[str, str]]          # {"csv": ..., "schema": ...}
    bands: List[BandConfig]
    grid: GridConfig = field(default_factory=GridConfig)
    time_quantile: float = 0.10
    freq_quantile: float = 0.25
    delta_db: float = 10.0
    epsilon: float = 0.05
    smooth_width: int = 5
    row_support_fraction: float = 0.5
    cdf_levels: Tuple[float, ...] = DEFAULT_CDF_LEVELS
    out_dir: str = "reports"
    base_dir: Path = field(default_factory=Path)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

        if "inputs" not in raw or not raw["inputs"]:
            raise ConfigError("config needs a non-empty 'inputs' list")
        if "bands" not in raw or not raw["bands"]:
            raise ConfigError("config needs a non-empty 'bands' list")
        bands = [band_from_dict(b) for b in raw["bands"]]
        grid = grid_from_dict(raw.get("grid", {}))
        return cls(
            campaign=raw.get("campaign", "campaign"),
            inputs=[dict(entry) for entry in raw["inputs"]],
            bands=bands,
            grid=grid,
            time_quantile=raw.get("time_quantile", 0.10),
            freq_quantile=raw.get("freq_quantile", 0.25),
            delta_db=raw.get("delta_db", 10.0),
            epsilon=raw.get("epsilon", 0.05),
            smooth_width=raw.get("smooth_width", 5),
            row_support_fraction=raw.get("row_support_fraction", 0.5),
            cdf_levels=tuple(raw.get("cdf_levels", DEFAULT_CDF_LEVELS)),
            out_dir=raw.get("out_dir", "reports"),
            base_dir=path.parent,
        )

    def echo(self) -> Dict:
        """Config echo for report provenance (output location excluded)."""
        return {
            "campaign": self.campaign,
            "inputs": self.inputs,
            "bands": [
                {"label": b.label, "low_hz": b.low_hz, "high_hz": b.high_hz,
                 "margin_hz": b.margin_hz} for b in self.bands
            ],
            "grid": {
                "freq_bin_hz": self.grid.freq_bin_hz,
                "alt_bin_m": self.grid.alt_bin_m,
                "window_s": self.grid.window_s,
                "min_samples_time": self.grid.min_samples_time,
                "min_samples_freq": self.grid.min_samples_freq,
            },
            "time_quantile": self.time_quantile,
            "freq_quantile": self.freq_quantile,
            "delta_db": self.delta_db,
            "epsilon": self.epsilon,
            "smooth_width": self.smooth_width,
            "row_support_fraction": self.row_support_fraction,
            "cdf_levels": list(self.cdf_levels),
        }


def band_from_dict(d: Dict) -> BandConfig:
    try:
        return BandConfig(low_hz=float(d["low_hz"]), high_hz=float(d["high_hz"]),
                          margin_hz=float(d.get("margin_hz", 50e6)),
                          label=str(d.get("label", "")))
    except KeyError as exc:
        raise ConfigError(f"band entry missing key {exc}") from exc


def grid_from_dict(d: Dict) -> GridConfig:
    return GridConfig(
        freq_bin_hz=float(d.get("freq_bin_hz", 60e3)),
        alt_bin_m=float(d.get("alt_bin_m", 10.0)),
        window_s=float(d.get("window_s", 60.0)),
        min_samples_time=int(d.get("min_samples_time", 2)),
        min_samples_freq=int(d.get("min_samples_freq", 2)),
    )


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def ingest_inputs(cfg: RunConfig) -> Tuple[List[SweepSample], IngestStats]:
    """Parse every input once; bands reuse the shared sample list."""
    stats = IngestStats()
    samples: List[SweepSample] = []
    for entry in cfg.inputs:
        if "csv" not in entry:
            raise ConfigError(f"input entry missing 'csv': {entry}")
        csv_path = cfg.base_dir / entry["csv"]
        schema_path = (cfg.base_dir / entry["schema"] if "schema" in entry
                       else Path(csv_path).with_suffix(".schema.json"))
        schema = ColumnSchema.from_json(schema_path)
        samples.extend(parse_sweep_file(csv_path, schema, stats))
    log.info("ingested %d rows (%d rejected) from %d file(s)",
             stats.rows_read, stats.rows_rejected, len(cfg.inputs))
    return samples, stats


def analyze_band(samples: List[SweepSample], band: BandConfig,
                 cfg: RunConfig) -> AnalysisReport:
    """Full metric chain for one band over an already-parsed sample list."""
    grid = build_grid(samples, band, cfg.grid)
    nr = noise_reference(grid, q_time=cfg.time_quantile, q_freq=cfg.freq_quantile)
    th = threshold(nr, delta_db=cfg.delta_db)
    rmap = smooth_mask(p_usable_map(grid, th, epsilon=cfg.epsilon),
                       width=cfg.smooth_width)
    profile = structural_profile(rmap, row_support_fraction=cfg.row_support_fraction)
    power = power_summary(grid, levels=cfg.cdf_levels)
    return AnalysisReport(campaign=cfg.campaign, band=band, grid=cfg.grid,
                          noise=nr, threshold=th, rmap=rmap, profile=profile,
                          power=power, config_echo=cfg.echo())


def _band_dirname(campaign: str, band: BandConfig, index: int) -> str:
    label = band.label.strip().replace(" ", "_") or f"band{index}"
    return f"{campaign}_{label}"


def _print_band_summary(report: AnalysisReport, out_dir: Path) -> None:
    band = report.band
    prof = report.profile
    print(f"== {report.campaign} / {band.label or 'band'} "
          f"({band.low_hz:.6g} - {band.high_hz:.6g} Hz) ==")
    print(f"  N_band {report.noise.n_band_dbm:.2f} dBm, "
          f"T_6G {report.threshold.t6g_dbm:.2f} dBm")
    if prof.alt_bins.size:
        print(f"  {prof.alt_bins.size} altitude rows, "
              f"{prof.alt_centers_m[0]:.6g} - {prof.alt_centers_m[-1]:.6g} m")
        print(f"  USAR {prof.usar.min():.3f} .. {prof.usar.max():.3f}, "
              f"max LCCB {prof.lccb_hz.max() / 1e6:.6g} MHz")
    else:
        print("  no altitude row met the support rule")
    print(f"  -> {out_dir}")


def cmd_analyze(args) -> int:
    cfg = RunConfig.from_json(args.config)
    if args.out is not None:
        cfg.out_dir = args.out
    if args.campaign is not None:
        cfg.campaign = args.campaign
    if args.epsilon is not None:
        cfg.epsilon = args.epsilon
    if args.delta_db is not None:
        cfg.delta_db = args.delta_db
    if args.smooth_width is not None:
        cfg.smooth_width = args.smooth_width

    samples, _ = ingest_inputs(cfg)
    out_root = Path(cfg.out_dir)
    if not out_root.is_absolute():
        out_root = cfg.base_dir / out_root  # config-relative, like inputs
    out_root.mkdir(parents=True, exist_ok=True)

    workers = int(os.environ.get(WORKERS_ENV, "1") or "1")
    if workers > 1 and len(cfg.bands) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda b: analyze_band(samples, b, cfg), cfg.bands))
    else:
        reports = [analyze_band(samples, band, cfg) for band in cfg.bands]

    merged = {"campaign": cfg.campaign, "bands": []}
    for i, (band, report) in enumerate(zip(cfg.bands, reports)):
        band_dir = out_root / _band_dirname(cfg.campaign, band, i)
        write_report(report, band_dir)
        _print_band_summary(report, band_dir)
        merged["bands"].append({
            "label": band.label,
            "dir": band_dir.name,
            "n_band_dbm": report.noise.n_band_dbm,
            "t6g_dbm": report.threshold.t6g_dbm,
        })
    with open(out_root / "overview.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(merged, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def load_scenario_file(path) -> Tuple[ScenarioSpec, BandConfig, GridConfig]:
    """Scenario files bundle the generator spec with its band and grid."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from exc
    if "band" not in raw:
        raise ConfigError("scenario file needs a 'band' object")
    band = band_from_dict(raw["band"])
    grid = grid_from_dict(raw.get("grid", {}))
    try:
        spec = ScenarioSpec.from_dict(raw)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid scenario spec: {exc}") from exc
    return spec, band, grid


def cmd_synth(args) -> int:
    spec, band, grid = load_scenario_file(args.scenario)
    samples, truth = generate(spec, band, grid)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    samples_to_csv(samples, out)

    contaminated = [
        [int(fi), int(ai), int(k)]
        for (fi, ai), ks in truth.all_contaminated_windows().items()
        for k in ks
    ]
    payload = {
        "band": {"label": band.label, "low_hz": band.low_hz,
                 "high_hz": band.high_hz, "margin_hz": band.margin_hz},
        "grid": {"freq_bin_hz": grid.freq_bin_hz, "alt_bin_m": grid.alt_bin_m,
                 "window_s": grid.window_s,
                 "min_samples_time": grid.min_samples_time,
                 "min_samples_freq": grid.min_samples_freq},
        "rng_seed": spec.rng_seed,
        "n_samples": len(samples),
        "emitter_bins": [sorted(int(i) for i in bins)
                         for bins in truth.emitter_bins],
        "contaminated_windows": sorted(contaminated),
    }
    with open(out.with_suffix(".truth.json"), "w", encoding="utf-8",
              newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %d samples to %s", len(samples), out)
    print(f"{out} ({len(samples)} samples), schema sidecar and ground truth written")
    return 0


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

_COMPARE_KEYS = ("low_hz", "high_hz")
_GRID_KEYS = ("freq_bin_hz", "alt_bin_m", "window_s")


def compare_reports(dir_a, dir_b) -> Dict:
    """Per-altitude metric deltas (B - A) for two compatible report dirs."""
    a = read_overview(dir_a)
    b = read_overview(dir_b)
    for key in _COMPARE_KEYS:
        if a["band"][key] != b["band"][key]:
            raise ConfigError(f"band mismatch on {key}: "
                              f"{a['band'][key]} vs {b['band'][key]}")
    for key in _GRID_KEYS:
        if a["grid"][key] != b["grid"][key]:
            raise ConfigError(f"grid mismatch on {key}: "
                              f"{a['grid'][key]} vs {b['grid'][key]}")

    rows_a = {r["alt_m"]: r for r in read_profile_csv(Path(dir_a) / "profile.csv")}
    rows_b = {r["alt_m"]: r for r in read_profile_csv(Path(dir_b) / "profile.csv")}
    deltas = []
    for alt in sorted(set(rows_a) & set(rows_b)):
        ra, rb = rows_a[alt], rows_b[alt]
        deltas.append({
            "alt_m": alt,
            "d_usar": rb["usar"] - ra["usar"],
            "d_lccb_hz": rb["lccb_hz"] - ra["lccb_hz"],
            "d_sfi": (rb["sfi"] - ra["sfi"]
                      if ra["sfi"] is not None and rb["sfi"] is not None else None),
        })
    return {
        "only_in_a": sorted(set(rows_a) - set(rows_b)),
        "only_in_b": sorted(set(rows_b) - set(rows_a)),
        "deltas": deltas,
    }


def cmd_compare(args) -> int:
    diff = compare_reports(args.a, args.b)
    print(f"{'alt_m':>8} {'d_usar':>9} {'d_lccb_mhz':>11} {'d_sfi':>9}")
    for row in diff["deltas"]:
        sfi_str = "-" if row["d_sfi"] is None else f"{row['d_sfi']:+9.3f}"
        print(f"{row['alt_m']:8.6g} {row['d_usar']:+9.3f} "
              f"{row['d_lccb_hz'] / 1e6:+11.4g} {sfi_str:>9}")
    if diff["only_in_a"] or diff["only_in_b"]:
        print(f"rows only in A: {diff['only_in_a']}; only in B: {diff['only_in_b']}")
    if diff["deltas"]:
        mean_du = sum(r["d_usar"] for r in diff["deltas"]) / len(diff["deltas"])
        print(f"mean d_usar {mean_du:+.4f} over {len(diff['deltas'])} shared rows")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specstruct",
        description="Structural spectrum metrics from SDR sweep campaigns.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="run the full metric chain per band")
    p_an.add_argument("--config", required=True, help="run config JSON")
    p_an.add_argument("--out", default=None, help="output directory override")
    p_an.add_argument("--campaign", default=None)
    p_an.add_argument("--epsilon", type=float, default=None)
    p_an.add_argument("--delta-db", dest="delta_db", type=float, default=None)
    p_an.add_argument("--smooth-width", dest="smooth_width", type=int, default=None)
    p_an.set_defaults(func=cmd_analyze)

    p_sy = sub.add_parser("synth", help="generate a synthetic sweep CSV fixture")
    p_sy.add_argument("--scenario", required=True, help="scenario JSON")
    p_sy.add_argument("--out", required=True, help="output CSV path")
    p_sy.set_defaults(func=cmd_synth)

    p_cp = sub.add_parser("compare", help="per-altitude deltas of two reports")
    p_cp.add_argument("--a", required=True, help="report directory A")
    p_cp.add_argument("--b", required=True, help="report directory B")
    p_cp.set_defaults(func=cmd_compare)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return 1
    except DataError as exc:
        log.error("data error: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())

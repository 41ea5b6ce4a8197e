"""
Report files and year-over-year comparison
==========================================

Generates two synthetic "years" of the same band (one clean, one with an
incumbent block), writes both report trees through the CLI entry points,
and diffs them the way the compare subcommand does. Everything lands in
demos/output/.
"""

import json
from pathlib import Path

from specstruct.cli import compare_reports, main

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

band = {"label": "demo", "low_hz": 1.0e9, "high_hz": 1.0e9 + 50 * 60e3,
        "margin_hz": 5 * 60e3}
grid = {"freq_bin_hz": 60e3, "alt_bin_m": 10.0, "window_s": 60.0,
        "min_samples_time": 2, "min_samples_freq": 2}


def scenario(tag, emitters, seed):
    payload = {
        "band": band, "grid": grid,
        "noise_floor_dbm": -100.0, "jitter_db": 1.0,
        "emitters": emitters,
        "duration_s": 600.0, "sample_rate_hz": 0.2, "rng_seed": seed,
        "altitudes_m": [5.0, 25.0, 45.0],
    }
    path = out / f"{tag}.scenario.json"
    path.write_text(json.dumps(payload, indent=2))
    return path


block = [{"center_hz": 1.0e9 + 20 * 60e3, "width_hz": 10 * 60e3,
          "power_dbm": -55.0, "duty_cycle": 1.0, "period_s": 60.0}]
scen_2023 = scenario("y2023", [], seed=23)
scen_2024 = scenario("y2024", block, seed=24)

for tag, scen in (("y2023", scen_2023), ("y2024", scen_2024)):
    assert main(["synth", "--scenario", str(scen),
                 "--out", str(out / f"{tag}.csv")]) == 0
    cfg = {
        "campaign": tag,
        "inputs": [{"csv": f"{tag}.csv"}],
        "bands": [band],
        "grid": grid,
        "out_dir": f"report_{tag}",
    }
    cfg_path = out / f"run_{tag}.json"
    cfg_path.write_text(json.dumps(cfg, indent=2))
    assert main(["analyze", "--config", str(cfg_path)]) == 0

print("\nreport tree for y2024:")
for p in sorted((out / "report_y2024" / "y2024_demo").iterdir()):
    print(f"  {p.name:>24}  {p.stat().st_size:6d} bytes")

print("\nfirst lines of profile.csv:")
profile = out / "report_y2024" / "y2024_demo" / "profile.csv"
for line in profile.read_text().splitlines()[:5]:
    print(f"  {line}")

diff = compare_reports(out / "report_y2023" / "y2023_demo",
                       out / "report_y2024" / "y2024_demo")
print("\nyear-over-year deltas (y2024 - y2023):")
for row in diff["deltas"]:
    print(f"  alt {row['alt_m']:5.1f} m: dUSAR {row['d_usar']:+.3f}, "
          f"dLCCB {row['d_lccb_hz'] / 1e6:+.2f} MHz")

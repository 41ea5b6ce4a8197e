"""Acceptance gate: one test per criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines. Criterion 8 needs the public campaign datasets on disk and is
skipped (without failing) when SPECSTRUCT_CAMPAIGN_DATA is unset.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

from specstruct import (BandConfig, Emitter, GridConfig, ScenarioSpec,
                        UsabilityThreshold, build_grid, generate, lccb,
                        noise_reference, segments, sfi, window_stats,
                        window_usable)
from specstruct.cli import main
from conftest import assert_pipeline_equals_oracle, run_pipeline, small_band


def report(n, ok, text):
    print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {text}")
    assert ok, f"criterion {n}: {text}"


# -- 1: segments/LCCB/SFI vs brute force on 1000 random masks ----------------

def brute_force_runs(row):
    """Enumerate every (i, j) pair; keep maximal all-true runs."""
    n = len(row)
    prefix = [0]
    for v in row:
        prefix.append(prefix[-1] + int(v))
    runs = []
    for i in range(n):
        for j in range(i, n):
            if prefix[j + 1] - prefix[i] != j - i + 1:
                continue
            if (i == 0 or not row[i - 1]) and (j == n - 1 or not row[j + 1]):
                runs.append((i, j - i + 1))
    return sorted(set(runs))


def test_criterion_1_oracle_equivalence_masks():
    rng = np.random.default_rng(1001)
    t0 = time.perf_counter()
    checked = 0
    for _ in range(1000):
        n = int(rng.integers(1, 65))
        row = (rng.random(n) < rng.uniform(0.1, 0.9)).tolist()
        expected = brute_force_runs(row)
        got = segments(np.asarray(row))
        assert got == expected
        exp_lccb = (max((L for _, L in expected), default=0)) * 60e3
        assert lccb(got, 60e3) == exp_lccb
        if expected:
            lengths = [L for _, L in expected]
            assert sfi(got) == 1.0 - max(lengths) / sum(lengths)
        else:
            assert sfi(got) is None
        checked += 1
    elapsed = time.perf_counter() - t0
    report(1, checked == 1000 and elapsed < 5.0,
           f"1000 random masks match brute force exactly in {elapsed:.2f}s")


# -- 2: full pipeline equals naive oracle on 20 scenarios --------------------

def _scenarios():
    """20 synthetic scenarios spanning the behaviors the chain must cover."""
    out = []

    def add(name, spec, n_bins, margin_bins=0, grid=None, **params):
        band = small_band(n_bins=n_bins, margin_bins=margin_bins, label=name)
        out.append((name, spec, band, grid or GridConfig(), params))

    def em(center_bin, width_bins, band_low=1.0e9, **kw):
        return Emitter(center_hz=band_low + center_bin * 60e3,
                       width_hz=width_bins * 60e3, power_dbm=-50.0, **kw)

    add("clean_single_alt",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=100),
        n_bins=12)
    add("clean_multi_alt",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=101,
                     altitudes_m=(5.0, 25.0, 45.0)),
        n_bins=10)
    add("persistent_center",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=102,
                     emitters=[em(10, 4)]),
        n_bins=20)
    add("persistent_band_edge",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=103,
                     emitters=[em(0, 6)]),
        n_bins=20)
    add("two_blocks",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=104,
                     emitters=[em(4, 2), em(15, 3)]),
        n_bins=24)
    add("pulsed_incommensurate",
        ScenarioSpec(duration_s=600, sample_rate_hz=0.5, rng_seed=105,
                     emitters=[em(3, 2, duty_cycle=0.5, period_s=7 / 3)]),
        n_bins=8)
    add("pulsed_slow",
        ScenarioSpec(duration_s=900, sample_rate_hz=0.2, rng_seed=106,
                     emitters=[em(2, 1, duty_cycle=0.3, period_s=130.0)]),
        n_bins=6)
    add("low_duty_spikes",
        ScenarioSpec(duration_s=600, sample_rate_hz=0.5, rng_seed=107,
                     emitters=[em(5, 3, duty_cycle=0.05, period_s=40.0)]),
        n_bins=15)
    add("altitude_coupled",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=108,
                     altitudes_m=(5.0, 55.0, 105.0),
                     emitters=[em(6, 3, altitude_gain_db=(0.0, -20.0, -60.0))]),
        n_bins=14)
    add("overlapping_emitters",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=109,
                     emitters=[em(5, 4), em(7, 4, duty_cycle=0.5,
                                            period_s=11 / 3)]),
        n_bins=16)
    add("margin_bins_present",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=110),
        n_bins=10, margin_bins=4)
    add("margin_with_emitter_in_margin",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=111,
                     emitters=[Emitter(center_hz=1.0e9 - 2 * 60e3,
                                       width_hz=3 * 60e3, power_dbm=-45.0)]),
        n_bins=10, margin_bins=4)
    add("sparse_single_window_cells",
        ScenarioSpec(duration_s=59, sample_rate_hz=0.2, rng_seed=112),
        n_bins=8)  # one window only: all cells unsupported -> DataError
    add("barely_supported",
        ScenarioSpec(duration_s=240, sample_rate_hz=1 / 30, rng_seed=113),
        n_bins=8)  # 2 samples per window, 4 windows
    add("wide_jitter",
        ScenarioSpec(jitter_db=6.0, duration_s=300, sample_rate_hz=0.1,
                     rng_seed=114),
        n_bins=12)
    add("strict_epsilon",
        ScenarioSpec(duration_s=600, sample_rate_hz=0.5, rng_seed=115,
                     emitters=[em(4, 2, duty_cycle=0.02, period_s=47.0)]),
        n_bins=10, **{"epsilon": 0.0})
    add("loose_epsilon_width3",
        ScenarioSpec(duration_s=600, sample_rate_hz=0.5, rng_seed=116,
                     emitters=[em(4, 2, duty_cycle=0.5, period_s=7 / 3)]),
        n_bins=10, **{"epsilon": 0.3, "smooth_width": 3})
    add("no_smoothing",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=117,
                     emitters=[em(8, 2)]),
        n_bins=16, **{"smooth_width": 1})
    add("wide_smoothing_row_rule",
        ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=118,
                     altitudes_m=(5.0, 15.0),
                     emitters=[em(9, 6)]),
        n_bins=18, **{"smooth_width": 7, "row_support_fraction": 0.25})
    add("large_100k",
        ScenarioSpec(duration_s=1000, sample_rate_hz=0.25, rng_seed=119,
                     altitudes_m=(5.0, 35.0, 65.0, 95.0),
                     emitters=[em(30, 10), em(70, 5, duty_cycle=0.5,
                                              period_s=13 / 3)]),
        n_bins=100)  # 100 bins x 4 alts x 250 times = 1e5 samples exactly
    return out


def test_criterion_2_definitional_equivalence():
    scenarios = _scenarios()
    assert len(scenarios) == 20
    n_samples_max = 0
    for name, spec, band, grid, params in scenarios:
        samples, _ = generate(spec, band, grid)
        assert len(samples) <= 100_000, name
        n_samples_max = max(n_samples_max, len(samples))
        if name == "sparse_single_window_cells":
            from specstruct import DataError, oracle_metrics
            with pytest.raises(DataError):
                run_pipeline(samples, band, grid, **params)
            with pytest.raises(DataError):
                oracle_metrics(samples, band, grid, **params)
            continue
        assert_pipeline_equals_oracle(samples, band, grid, **params)
    report(2, True, f"20 scenarios equal the naive oracle exactly "
                    f"(largest {n_samples_max} samples)")


# -- 3: clean-band trivials ---------------------------------------------------

def test_criterion_3_clean_band():
    band = small_band(n_bins=40)
    grid = GridConfig()
    spec = ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=300,
                        altitudes_m=(5.0, 25.0, 45.0))
    samples, _ = generate(spec, band, grid)
    _, _, _, _, profile, _ = run_pipeline(samples, band, grid, smooth_width=5)
    ok = (profile.alt_bins.size == 3
          and np.all(profile.usar == 1.0)
          and np.all(profile.sfi == 0.0)
          and np.all(profile.lccb_hz == 40 * grid.freq_bin_hz))
    report(3, bool(ok),
           "clean band: USAR=1.000, SFI=0, LCCB=N_b*bin_width at every row")


# -- 4: noise-reference robustness --------------------------------------------

def test_criterion_4_noise_reference_robustness():
    band = small_band(n_bins=50)
    grid = GridConfig()
    # +40 dB spikes, 5% time duty (period 40 s sampled every 2 s), 20% of bins
    spike = Emitter(center_hz=band.low_hz + 25 * 60e3, width_hz=10 * 60e3,
                    power_dbm=-60.0, duty_cycle=0.05, period_s=40.0)
    spec = ScenarioSpec(noise_floor_dbm=-100.0, jitter_db=1.0,
                        emitters=[spike], duration_s=320.0,
                        sample_rate_hz=0.5, rng_seed=400)
    samples, truth = generate(spec, band, grid)
    hit = truth.cell_truth[(25, 0)][:, 2].mean()
    assert hit <= 0.05
    assert len(truth.emitter_bins[0]) == 10
    nr = noise_reference(build_grid(samples, band, grid))
    err = abs(nr.n_band_dbm - (-100.0))
    report(4, err < 1.0,
           f"|N_band - (-100 dBm)| = {err:.3f} dB < 1 dB under spikes")


# -- 5: occupancy arithmetic ---------------------------------------------------

def test_criterion_5_occupancy_arithmetic():
    n_bins = 50
    band = small_band(n_bins=n_bins)
    grid = GridConfig()
    # bins 10..19 occupied: 20% of the band, clean gaps of 10 and 30 bins
    em = Emitter(center_hz=band.low_hz + 15 * 60e3, width_hz=10 * 60e3,
                 power_dbm=-50.0)
    spec = ScenarioSpec(duration_s=300, sample_rate_hz=0.1, rng_seed=500,
                        emitters=[em])
    samples, truth = generate(spec, band, grid)
    assert truth.emitter_bins[0] == list(range(10, 20))

    # metric arithmetic is exact without smoothing (width 1)
    _, _, _, _, prof, _ = run_pipeline(samples, band, grid, smooth_width=1)
    usar_err = abs(prof.usar[0] - 0.80)
    ok = (usar_err <= 2 / n_bins
          and prof.lccb_hz[0] == 30 * grid.freq_bin_hz
          and prof.sfi[0] == 1.0 - 30 / 40
          and prof.segments[0] == [(0, 10), (20, 30)])
    report(5, bool(ok),
           f"20% occupancy: USAR={prof.usar[0]:.3f} (|err|={usar_err:.3f}), "
           f"LCCB=larger gap, SFI=two-segment formula, all exact")

    # documented companion: the default 5-bin filter erodes 2 clean bins per
    # block boundary, shrinking each gap accordingly
    _, _, _, _, prof5, _ = run_pipeline(samples, band, grid, smooth_width=5)
    assert prof5.segments[0] == [(0, 8), (22, 28)]
    assert prof5.usar[0] == 36 / 50
    assert prof5.lccb_hz[0] == 28 * grid.freq_bin_hz
    assert prof5.sfi[0] == 1.0 - 28 / 36


# -- 6: threshold boundary semantics -------------------------------------------

def test_criterion_6_boundary_semantics():
    th = UsabilityThreshold(t6g_dbm=-90.0, delta_db=10.0)
    cell = np.column_stack((np.arange(4, dtype=float),
                            np.array([-90.0, -90.0001, -95.0, -89.9999])))
    (stat,) = window_stats(cell, th, 60.0)
    exactly_at = stat.usable_count == 2        # -90.0 and -89.9999 not usable

    powers = np.array([-95.0] * 19 + [-80.0])
    (stat20,) = window_stats(np.column_stack((np.arange(20.0), powers)), th, 60.0)
    boundary_eta = stat20.usable_fraction == 0.95 and window_usable(stat20, 0.05)

    powers94 = np.array([-95.0] * 47 + [-80.0] * 3)
    (stat50,) = window_stats(np.column_stack((np.arange(50.0), powers94)), th, 60.0)
    below = not window_usable(stat50, 0.05)    # 0.94 < 0.95

    report(6, exactly_at and boundary_eta and below,
           "P == T_6G not usable; eta == 1-eps usable; eta < 1-eps not")


# -- 7: end-to-end determinism --------------------------------------------------

def tree_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(Path(root).rglob("*")) if p.is_file()}


def test_criterion_7_byte_identical_runs(tmp_path):
    scen = {
        "band": {"label": "det", "low_hz": 1.0e9, "high_hz": 1.0e9 + 30 * 60e3,
                 "margin_hz": 3 * 60e3},
        "grid": {"freq_bin_hz": 60e3, "alt_bin_m": 10.0, "window_s": 60.0,
                 "min_samples_time": 2, "min_samples_freq": 2},
        "noise_floor_dbm": -100.0, "jitter_db": 1.0,
        "emitters": [{"center_hz": 1.0e9 + 8 * 60e3, "width_hz": 4 * 60e3,
                      "power_dbm": -50.0, "duty_cycle": 0.5,
                      "period_s": 2.3333333333333335}],
        "duration_s": 300.0, "sample_rate_hz": 0.2, "rng_seed": 700,
        "altitudes_m": [5.0, 25.0],
    }
    scen_path = tmp_path / "scenario.json"
    scen_path.write_text(json.dumps(scen))
    assert main(["synth", "--scenario", str(scen_path),
                 "--out", str(tmp_path / "data.csv")]) == 0
    cfg = {
        "campaign": "det",
        "inputs": [{"csv": "data.csv"}],
        "bands": [scen["band"]],
        "grid": scen["grid"],
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["analyze", "--config", str(cfg_path),
                 "--out", str(tmp_path / "r1")]) == 0
    assert main(["analyze", "--config", str(cfg_path),
                 "--out", str(tmp_path / "r2")]) == 0
    t1, t2 = tree_bytes(tmp_path / "r1"), tree_bytes(tmp_path / "r2")
    report(7, t1 == t2 and len(t1) >= 7,
           f"two runs produced byte-identical report trees ({len(t1)} files)")


# -- 8: optional campaign-scale reproduction -------------------------------------

DATA_ENV = "SPECSTRUCT_CAMPAIGN_DATA"


@pytest.mark.skipif(DATA_ENV not in os.environ,
                    reason=f"{DATA_ENV} not set; campaign datasets not fetched "
                           "(see README for the download recipe)")
def test_criterion_8_campaign_scale_2024_urban():
    data_dir = Path(os.environ[DATA_ENV])
    csv = data_dir / "pack2024.csv"
    assert csv.exists(), f"expected {csv} (see README data recipe)"
    from specstruct import ColumnSchema, parse_sweep_file
    from conftest import run_pipeline as rp
    schema = ColumnSchema.from_json(csv.with_suffix(".schema.json"))
    samples = list(parse_sweep_file(csv, schema))
    band = BandConfig(low_hz=2.69e9, high_hz=2.9e9, margin_hz=50e6,
                      label="2p69_2p9")
    _, nr, th, rmap, profile, _ = rp(samples, band, GridConfig())
    usar_med = float(np.median(profile.usar))
    lccb_med = float(np.median(profile.lccb_hz))
    ok = 0.55 <= usar_med <= 0.75 and 50e6 <= lccb_med <= 90e6
    report(8, ok, f"2024 urban: median USAR {usar_med:.3f} in [0.55, 0.75], "
                  f"median LCCB {lccb_med / 1e6:.1f} MHz in [50, 90]")

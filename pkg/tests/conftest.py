"""Shared fixtures and the exact pipeline-vs-oracle comparison helper."""

import numpy as np
import pytest

from specstruct import (BandConfig, GridConfig, build_grid, noise_reference,
                        oracle_metrics, p_usable_map, pmax_map, smooth_mask,
                        structural_profile, threshold)


def small_band(n_bins=20, low_hz=1.0e9, freq_bin_hz=60e3, margin_bins=0,
               label="test"):
    return BandConfig(low_hz=low_hz, high_hz=low_hz + n_bins * freq_bin_hz,
                      margin_hz=margin_bins * freq_bin_hz, label=label)


def run_pipeline(samples, band, grid, q_time=0.10, q_freq=0.25, delta_db=10.0,
                 epsilon=0.05, smooth_width=5, row_support_fraction=0.5):
    """Main-path chain, returning every intermediate product."""
    sgrid = build_grid(samples, band, grid)
    nr = noise_reference(sgrid, q_time=q_time, q_freq=q_freq)
    th = threshold(nr, delta_db=delta_db)
    rmap = smooth_mask(p_usable_map(sgrid, th, epsilon=epsilon), width=smooth_width)
    profile = structural_profile(rmap, row_support_fraction=row_support_fraction)
    alt_bins, pmax = pmax_map(sgrid)
    return sgrid, nr, th, rmap, profile, (alt_bins, pmax)


def grid_to_dict(alt_bins, values):
    """NaN-sparse (n_alt, n_freq) array as {(freq_bin, alt_bin): value}."""
    out = {}
    for r, ai in enumerate(alt_bins):
        for fi in range(values.shape[1]):
            v = values[r, fi]
            if not np.isnan(v):
                out[(fi, int(ai))] = float(v)
    return out


def assert_pipeline_equals_oracle(samples, band, grid, **params):
    """Exact (zero tolerance) agreement of the pipeline with oracle_metrics."""
    _, nr, th, rmap, profile, (alt_bins, pmax) = run_pipeline(
        samples, band, grid, **params)
    orc = oracle_metrics(samples, band, grid, **params)

    assert nr.n_band_dbm == orc.n_band_dbm
    assert th.t6g_dbm == orc.t6g_dbm
    assert grid_to_dict(rmap.alt_bins, rmap.p_usable) == orc.p_usable
    assert grid_to_dict(rmap.alt_bins, rmap.smoothed_p) == orc.smoothed_p

    nwin = {}
    for r, ai in enumerate(rmap.alt_bins):
        for fi in range(rmap.n_core_bins):
            if rmap.supported_windows[r, fi] > 0:
                nwin[(fi, int(ai))] = int(rmap.supported_windows[r, fi])
    assert nwin == orc.supported_windows

    mask = {}
    for r, ai in enumerate(rmap.alt_bins):
        for fi in range(rmap.n_core_bins):
            if not np.isnan(rmap.smoothed_p[r, fi]):
                mask[(fi, int(ai))] = bool(rmap.usable_mask[r, fi])
    assert mask == orc.usable

    rows = [
        (int(a), float(u), float(l), (None if np.isnan(s) else float(s)), seg)
        for a, u, l, s, seg in zip(profile.alt_bins, profile.usar,
                                   profile.lccb_hz, profile.sfi,
                                   profile.segments)
    ]
    assert rows == orc.rows
    assert grid_to_dict(alt_bins, pmax) == orc.pmax
    return nr, th, rmap, profile


@pytest.fixture
def default_grid():
    return GridConfig()

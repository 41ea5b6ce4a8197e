"""Structural spectrum metrics from wideband SDR sweep campaigns.

Pipeline: ingest sweep CSVs into a frequency x altitude x time grid,
estimate a robust band noise reference and usability threshold, evaluate
scan-window reliability per grid cell, then derive availability (USAR),
contiguity (LCCB), fragmentation (SFI) and extreme-power maps per altitude.
"""

from .ingest import (BandConfig, ColumnSchema, ConfigError, DataError,
                     GridConfig, IngestStats, NATIVE_SCHEMA, SampleGrid,
                     SweepSample, build_grid, cell_support, parse_sweep_file)
from .noisefloor import (NoiseReference, UsabilityThreshold,
                         band_noise_reference, nearest_rank, noise_reference,
                         per_bin_temporal_floor, threshold)
from .reliability import (ReliabilityMap, ScanWindowStat, p_usable_map,
                          smooth_mask, window_stats, window_usable)
from .structure import (DEFAULT_CDF_LEVELS, PowerSummary, StructuralProfile,
                        lccb, pmax_map, power_distribution, power_summary,
                        segments, sfi, structural_profile, usar)
from .synth import (Emitter, GroundTruth, OracleResult, ScenarioSpec,
                    generate, oracle_metrics, samples_to_csv)
from .report import (AnalysisReport, read_grid_csv, read_overview,
                     read_profile_csv, write_distribution_csv, write_grid_csv,
                     write_profile_csv, write_report)

__version__ = "0.1.0"

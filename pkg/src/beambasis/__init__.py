"""Phased-array weight compression, independent-row bases, and beam steering.

The pipeline: build an M x N complex weight matrix for a scan plan, compress
it with a truncated SVD, select a small set of linearly independent rows as a
basis, solve per-direction combination coefficients, and evaluate the
resulting far-field patterns. A particle swarm picks basis rows under a gain
bound, and a scenario runner persists reproducible artifact bundles.
"""

from ._validation import ValidationError
from .arraymodel import (ArrayGeometry, PhaseMatrix, ScanPlan, WeightMatrix,
                         build_phase_matrix, build_phase_matrix_2d,
                         build_weight_matrix, cao_phase_offsets,
                         combine_weighted_groups, delta_phi, delta_phi_2d,
                         phase_to_grayscale, planar_phase_rows, wrap_degrees,
                         wrap_phase)
from .compression import (TruncatedSvd, TruncationPolicy, energy_fraction,
                          reconstruction_error, svd, truncate,
                          truncation_rank)
from .dataset import (DatasetRecord, DatasetSpec, generate_dataset,
                      generate_record, load_dataset, parse_dataset_spec)
from .estimators import LivgTransformer, SvdCompressor
from .farfield import (BeamMetrics, FarFieldPattern, array_factor,
                       azimuth_cut, beam_metrics, default_grid, main_lobe,
                       peak_sidelobe_level, pitch_cut, pointing_mae,
                       steering_matrix, steering_matrix_2d, steering_vector,
                       steering_vector_2d)
from .livg import (KVector, Livg, max_k_magnitude, numerical_rank,
                   reconstruct_row, select_livg, solve_k, solve_k_batch)
from .pso import (ObjectiveContext, PsoConfig, PsoResult,
                  make_objective_context, objective, optimize,
                  repair_position)
from .scenario import (Scenario, ScenarioResult, bundled_scenarios,
                       export_pattern, load_scenario, parse_scenario,
                       read_complex_csv, run_scenario, write_complex_csv)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry", "BeamMetrics", "DatasetRecord", "DatasetSpec",
    "FarFieldPattern", "KVector", "Livg", "LivgTransformer",
    "ObjectiveContext", "PhaseMatrix", "PsoConfig", "PsoResult", "Scenario",
    "ScenarioResult", "ScanPlan", "SvdCompressor", "TruncatedSvd",
    "TruncationPolicy", "ValidationError", "WeightMatrix", "array_factor",
    "azimuth_cut", "beam_metrics", "build_phase_matrix",
    "build_phase_matrix_2d", "build_weight_matrix", "bundled_scenarios",
    "cao_phase_offsets", "combine_weighted_groups", "default_grid",
    "delta_phi", "delta_phi_2d", "energy_fraction", "export_pattern",
    "generate_dataset", "generate_record", "load_dataset", "load_scenario",
    "main_lobe", "make_objective_context", "max_k_magnitude",
    "numerical_rank", "objective", "optimize", "parse_dataset_spec",
    "parse_scenario", "peak_sidelobe_level", "phase_to_grayscale",
    "pitch_cut", "planar_phase_rows", "pointing_mae", "read_complex_csv",
    "reconstruct_row", "reconstruction_error", "repair_position",
    "run_scenario", "select_livg", "solve_k", "solve_k_batch",
    "steering_matrix", "steering_matrix_2d", "steering_vector",
    "steering_vector_2d", "svd", "truncate", "truncation_rank",
    "wrap_degrees", "wrap_phase", "write_complex_csv",
]

"""Scenario files: parse, validate, execute, and persist artifact bundles.

A scenario is a single YAML document describing geometry, scan plan,
truncation, basis selection, and output location. Running one executes the
whole pipeline (phases -> weights -> compression -> basis -> K table ->
patterns -> metrics) and writes every artifact plus a manifest of content
hashes. Re-running with the same seed reproduces every file byte for byte.
"""

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from ._validation import ValidationError, require
from .arraymodel import (ArrayGeometry, PhaseMatrix, ScanPlan,
                         build_phase_matrix, build_phase_matrix_2d,
                         build_weight_matrix, phase_to_grayscale)
from .compression import (TruncationPolicy, energy_fraction,
                          reconstruction_error, svd, truncate, truncation_rank)
from .farfield import (_pattern_from_field, beam_metrics, default_grid,
                       steering_matrix, steering_matrix_2d)
from .livg import Livg, numerical_rank, select_livg, solve_k_batch
from .pso import PsoConfig, make_objective_context, optimize

_SCENARIO_KEYS = {"name", "seed", "geometry", "scan", "truncation", "livg",
                  "pso", "grid", "output_dir"}
_LIVG_SOURCES = ("equally-spaced", "pso", "explicit", "file")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Scenario:
    """Validated scenario configuration."""

    name: str
    geometry: ArrayGeometry
    scan: ScanPlan
    truncation: TruncationPolicy
    livg_source: str
    livg_rank: int | None
    livg_indices: tuple | None
    livg_path: str | None
    pso: PsoConfig
    grid_step_deg: float
    output_dir: str
    seed: int

    @property
    def m_total(self):
        """Total direction count: planar scenarios stack two cuts."""
        factor = 2 if self.geometry.layout == "planar" else 1
        return self.scan.m_steps * factor

    def with_overrides(self, seed=None, output_dir=None, grid_step_deg=None):
        """Copy with command-line overrides applied (seed also reseeds pso)."""
        updated = self
        if seed is not None:
            pso = dataclasses.replace(self.pso, rng_seed=int(seed))
            updated = dataclasses.replace(updated, seed=int(seed), pso=pso)
        if output_dir is not None:
            updated = dataclasses.replace(updated, output_dir=str(output_dir))
        if grid_step_deg is not None:
            updated = dataclasses.replace(updated,
                                          grid_step_deg=float(grid_step_deg))
        return updated


def _reject_unknown(block, allowed, where):
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ValidationError(
            f"{where}.{unknown[0]}: unknown key (allowed: {', '.join(sorted(allowed))})")


def _section(data, key, where="scenario", required=False):
    if key not in data:
        if required:
            raise ValidationError(f"{where}.{key}: required section is missing")
        return {}
    value = data[key]
    require(isinstance(value, dict), f"{where}.{key}", "must be a mapping")
    return value


def _number(block, key, where, default=None, integer=False):
    if key not in block:
        return default
    value = block[key]
    require(isinstance(value, (int, float)) and not isinstance(value, bool),
            f"{where}.{key}", "must be a number")
    if integer:
        require(float(value).is_integer(), f"{where}.{key}",
                "must be an integer")
        return int(value)
    return float(value)


def _parse_geometry(block):
    _reject_unknown(block, ("layout", "n_elements", "n_side", "spacing"),
                    "geometry")
    layout = block.get("layout", "linear")
    require(layout in ("linear", "planar"), "geometry.layout",
            "must be 'linear' or 'planar'")
    spacing = _number(block, "spacing", "geometry", default=0.5)
    if layout == "planar":
        n_side = _number(block, "n_side", "geometry", integer=True)
        require(n_side is not None, "geometry.n_side",
                "required for planar layout")
        geometry = ArrayGeometry.planar(n_side, spacing)
        n_elements = _number(block, "n_elements", "geometry", integer=True)
        if n_elements is not None:
            require(n_elements == geometry.n_elements, "geometry.n_elements",
                    "must equal n_side squared")
        return geometry
    n_elements = _number(block, "n_elements", "geometry", integer=True)
    require(n_elements is not None, "geometry.n_elements",
            "required for linear layout")
    return ArrayGeometry.linear(n_elements, spacing)


def _parse_scan(block):
    _reject_unknown(block, ("m_steps", "theta_start_deg", "theta_end_deg",
                            "phi_start_deg", "phi_end_deg"), "scan")
    m_steps = _number(block, "m_steps", "scan", integer=True)
    require(m_steps is not None, "scan.m_steps", "required")
    return ScanPlan(
        m_steps=m_steps,
        theta_start_deg=_number(block, "theta_start_deg", "scan", default=0.0),
        theta_end_deg=_number(block, "theta_end_deg", "scan", default=0.0),
        phi_start_deg=_number(block, "phi_start_deg", "scan", default=0.0),
        phi_end_deg=_number(block, "phi_end_deg", "scan", default=0.0))


def _parse_livg(block, m_total, geometry):
    _reject_unknown(block, ("source", "rank", "indices", "path"), "livg")
    source = block.get("source", "equally-spaced")
    require(source in _LIVG_SOURCES, "livg.source",
            f"must be one of {', '.join(_LIVG_SOURCES)}")
    rank = _number(block, "rank", "livg", integer=True)
    indices = block.get("indices")
    path = block.get("path")
    if source == "explicit":
        require(isinstance(indices, (list, tuple)) and len(indices) > 0,
                "livg.indices", "required (a list of row indices) for source 'explicit'")
        parsed = []
        for i in indices:
            require(isinstance(i, int) and not isinstance(i, bool),
                    "livg.indices", "entries must be integers")
            require(0 <= i < m_total, "livg.indices",
                    f"entries must lie in [0, {m_total})")
            parsed.append(i)
        indices = tuple(parsed)
        if rank is None:
            rank = len(indices)
        require(rank == len(indices), "livg.rank",
                "must equal the index count for source 'explicit'")
    else:
        require(indices is None, "livg.indices",
                "only valid for source 'explicit'")
    if source == "file":
        require(isinstance(path, str) and path, "livg.path",
                "required (a csv of basis rows) for source 'file'")
    else:
        require(path is None, "livg.path", "only valid for source 'file'")
        if source != "explicit":
            require(rank is not None, "livg.rank",
                    f"required for source '{source}'")
    if source == "pso":
        require(geometry.layout == "linear", "livg.source",
                "pso selection supports linear layouts only")
    if rank is not None:
        require(rank >= 1, "livg.rank", "must be >= 1")
        require(rank <= geometry.n_elements, "livg.rank",
                "must not exceed the element count")
        require(rank <= m_total, "livg.rank",
                "must not exceed the direction count")
    return source, rank, indices, path


def _parse_pso(block, seed):
    allowed = ("swarm_size", "iterations", "inertia", "cognitive", "social",
               "v_max", "k_bound", "penalty_weight")
    _reject_unknown(block, allowed, "pso")
    kwargs = {"rng_seed": seed}
    for key in allowed:
        if key in block:
            integer = key in ("swarm_size", "iterations")
            kwargs[key] = _number(block, key, "pso", integer=integer)
    return PsoConfig(**kwargs)


def parse_scenario(data, source="scenario"):
    """Validate a parsed YAML mapping into a :class:`Scenario`."""
    require(isinstance(data, dict), "scenario", "must be a mapping of sections")
    _reject_unknown(data, _SCENARIO_KEYS, "scenario")
    name = data.get("name")
    require(isinstance(name, str) and bool(name), "scenario.name",
            "must be a nonempty string")
    seed = data.get("seed", 0)
    require(isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0,
            "scenario.seed", "must be a nonnegative integer")
    geometry = _parse_geometry(_section(data, "geometry", required=True))
    scan = _parse_scan(_section(data, "scan", required=True))
    m_total = scan.m_steps * (2 if geometry.layout == "planar" else 1)
    livg_source, livg_rank, livg_indices, livg_path = _parse_livg(
        _section(data, "livg", required=True), m_total, geometry)
    trunc_block = _section(data, "truncation")
    if trunc_block:
        _reject_unknown(trunc_block, ("policy", "value"), "truncation")
        policy = trunc_block.get("policy", "rank")
        value = trunc_block.get("value")
        require(value is not None, "truncation.value", "required")
        truncation = TruncationPolicy(kind=policy, value=value)
    else:
        require(livg_rank is not None, "truncation",
                "required when livg.rank is not set")
        truncation = TruncationPolicy.fixed_rank(livg_rank)
    pso = _parse_pso(_section(data, "pso"), seed)
    grid_block = _section(data, "grid")
    _reject_unknown(grid_block, ("step_deg",), "grid")
    grid_step = _number(grid_block, "step_deg", "grid", default=0.05)
    require(grid_step > 0, "grid.step_deg", "must be > 0")
    output_dir = data.get("output_dir", f"out/{name}")
    require(isinstance(output_dir, str) and bool(output_dir),
            "scenario.output_dir", "must be a nonempty string")
    return Scenario(
        name=name, geometry=geometry, scan=scan, truncation=truncation,
        livg_source=livg_source, livg_rank=livg_rank,
        livg_indices=livg_indices, livg_path=livg_path, pso=pso,
        grid_step_deg=grid_step, output_dir=output_dir, seed=seed)


def bundled_scenarios():
    """Names of the scenario files shipped inside the package."""
    root = resources.files("beambasis") / "scenarios"
    return sorted(entry.name[:-5] for entry in root.iterdir()
                  if entry.name.endswith(".yaml"))


def load_scenario(ref):
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(ref)
    if path.is_file():
        return parse_scenario(yaml.safe_load(path.read_text()))
    candidate = resources.files("beambasis") / "scenarios" / f"{ref}.yaml"
    if "/" not in str(ref) and candidate.is_file():
        return parse_scenario(yaml.safe_load(candidate.read_text()))
    raise ValidationError(
        f"scenario: no such file or bundled scenario '{ref}' "
        f"(bundled: {', '.join(bundled_scenarios())})")


# ---------------------------------------------------------------------------
# artifact writers


def _fmt(value):
    return repr(float(value))


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _complex_header(n):
    return [f"re{j}" for j in range(n)] + [f"im{j}" for j in range(n)]


def write_complex_csv(path, matrix):
    """Persist a complex matrix as real columns then imaginary columns."""
    values = np.asarray(matrix, dtype=complex)
    require(values.ndim == 2, "write_complex_csv.matrix", "must be 2-D")
    rows = ([_fmt(v) for v in np.concatenate([row.real, row.imag])]
            for row in values)
    _write_csv(path, _complex_header(values.shape[1]), rows)


def read_complex_csv(path):
    """Inverse of :func:`write_complex_csv`."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"matrix path: no such file '{path}'")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=float)
    if data.shape[1] % 2 != 0:
        raise ValidationError(
            f"matrix file '{path}': expected an even column count "
            "(real halves then imaginary halves)")
    n = data.shape[1] // 2
    return data[:, :n] + 1j * data[:, n:]


def _write_float_matrix_csv(path, matrix, prefix="e"):
    values = np.asarray(matrix, dtype=float)
    header = [f"{prefix}{j}" for j in range(values.shape[1])]
    _write_csv(path, header, ([_fmt(v) for v in row] for row in values))


def export_pattern(pattern, path, format="csv"):
    """Write one far-field pattern as csv (theta_deg,af_db) or json."""
    path = Path(path)
    if format == "csv":
        rows = ([_fmt(t), _fmt(v)]
                for t, v in zip(pattern.theta_grid_deg, pattern.af_db))
        _write_csv(path, ["theta_deg", "af_db"], rows)
    elif format == "json":
        payload = {"theta_deg": [float(t) for t in pattern.theta_grid_deg],
                   "af_db": [float(v) for v in pattern.af_db]}
        path.write_text(json.dumps(payload) + "\n")
    else:
        raise ValidationError("export_pattern.format: must be 'csv' or 'json'")
    return path


def _write_pattern_table(path, grid_deg, patterns, axis, first_index):
    header = [axis] + [f"d{first_index + m}" for m in range(len(patterns))]
    db = np.column_stack([p.af_db for p in patterns])
    rows = ([f"{grid_deg[g]:.6f}"] + [f"{v:.6f}" for v in db[g]]
            for g in range(len(grid_deg)))
    _write_csv(path, header, rows)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class ScenarioResult:
    """Where a run landed and the summary it wrote."""

    output_dir: Path
    summary: dict


def _build_cuts(scenario, grid):
    """Per-cut steering matrices, row ranges, and intended angles."""
    geometry, scan = scenario.geometry, scenario.scan
    if geometry.layout == "linear":
        return [{"name": "theta", "axis": "theta_deg",
                 "rows": slice(0, scan.m_steps), "steer": scan.theta_deg(),
                 "d": steering_matrix(grid, geometry)}]
    m = scan.m_steps
    pitch_phi = np.full_like(grid, scan.phi_start_deg)
    azimuth_theta = np.full_like(grid, scan.theta_end_deg)
    return [
        {"name": "pitch", "axis": "theta_deg", "rows": slice(0, m),
         "steer": np.linspace(scan.theta_start_deg, scan.theta_end_deg, m),
         "d": steering_matrix_2d(grid, pitch_phi, geometry)},
        {"name": "azimuth", "axis": "phi_deg", "rows": slice(m, 2 * m),
         "steer": np.linspace(scan.phi_start_deg, scan.phi_end_deg, m),
         "d": steering_matrix_2d(azimuth_theta, grid, geometry)},
    ]


def _build_phases(scenario):
    geometry, scan = scenario.geometry, scenario.scan
    if geometry.layout == "linear":
        return build_phase_matrix(geometry, scan)
    pitch = ScanPlan(scan.m_steps, scan.theta_start_deg, scan.theta_end_deg,
                     scan.phi_start_deg, scan.phi_start_deg)
    azimuth = ScanPlan(scan.m_steps, scan.theta_end_deg, scan.theta_end_deg,
                       scan.phi_start_deg, scan.phi_end_deg)
    stacked = np.vstack([build_phase_matrix_2d(geometry, pitch).values,
                         build_phase_matrix_2d(geometry, azimuth).values])
    return PhaseMatrix(values=stacked)


def _build_livg(scenario, weights, b, grid):
    """Resolve the configured basis source to (livg, pso_result_or_None)."""
    m_total = scenario.m_total
    if scenario.livg_source == "equally-spaced":
        indices = np.round(np.linspace(0, m_total - 1,
                                       scenario.livg_rank)).astype(int)
        return select_livg(b.values, indices), None
    if scenario.livg_source == "explicit":
        return select_livg(b.values, scenario.livg_indices), None
    if scenario.livg_source == "pso":
        ctx = make_objective_context(weights.values, b.values,
                                     scenario.geometry, grid_deg=grid,
                                     rank=scenario.livg_rank)
        result = optimize(ctx, scenario.pso)
        return result.livg, result
    rows = read_complex_csv(scenario.livg_path)
    require(rows.shape[1] == scenario.geometry.n_elements, "livg.path",
            "row length must equal the element count")
    if scenario.livg_rank is not None:
        require(rows.shape[0] == scenario.livg_rank, "livg.path",
                "row count must equal livg.rank")
    return Livg(row_indices=tuple(range(rows.shape[0])), c=rows), None


def run_scenario(scenario):
    """Execute one scenario and write its artifact bundle.

    Returns a :class:`ScenarioResult`; every written file is listed in the
    bundle's manifest.json with a sha256 content hash.
    """
    out = Path(scenario.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = default_grid(scenario.grid_step_deg)
    phases = _build_phases(scenario)
    weights = build_weight_matrix(phases)
    factors = svd(weights.values)
    retained = truncation_rank(factors, scenario.truncation)
    b = truncate(factors, scenario.truncation)
    livg, pso_result = _build_livg(scenario, weights, b, grid)
    if pso_result is not None:
        k_matrix, residuals = pso_result.k_matrix, pso_result.residuals
    else:
        k_matrix, residuals = solve_k_batch(livg, b.values)
    recon = k_matrix @ livg.c

    single_cut = scenario.geometry.layout == "linear"
    cuts = _build_cuts(scenario, grid)
    metric_rows, k_rows, cut_summaries = [], [], {}
    written = []

    def emit(name, writer, *args):
        writer(out / name, *args)
        written.append(name)

    for cut in cuts:
        ideal_fields = cut["d"] @ weights.values[cut["rows"]].T
        recon_fields = cut["d"] @ recon[cut["rows"]].T
        ideal_patterns = [_pattern_from_field(grid, ideal_fields[:, m])
                          for m in range(ideal_fields.shape[1])]
        recon_patterns = [_pattern_from_field(grid, recon_fields[:, m])
                          for m in range(recon_fields.shape[1])]
        errors = []
        first = cut["rows"].start
        for m, (ideal_p, recon_p) in enumerate(zip(ideal_patterns,
                                                   recon_patterns)):
            ideal_m = beam_metrics(ideal_p)
            recon_m = beam_metrics(recon_p, reference_deg=ideal_m.pointing_deg)
            errors.append(recon_m.pointing_error_deg)
            index = first + m
            peak_ratio = (recon_m.mainlobe_mag / ideal_m.mainlobe_mag
                          if ideal_m.mainlobe_mag > 0 else 0.0)
            metric_rows.append([
                str(index), cut["name"], _fmt(cut["steer"][m]),
                _fmt(ideal_m.pointing_deg), _fmt(recon_m.pointing_deg),
                _fmt(recon_m.pointing_error_deg),
                "" if ideal_m.psll_db is None else _fmt(ideal_m.psll_db),
                "" if recon_m.psll_db is None else _fmt(recon_m.psll_db),
                _fmt(peak_ratio)])
            k_row = k_matrix[index]
            k_rows.append(
                [str(index), cut["name"], _fmt(cut["steer"][m]),
                 _fmt(residuals[index]), _fmt(np.abs(k_row).max())]
                + [_fmt(v) for v in np.abs(k_row)]
                + [_fmt(v) for v in np.degrees(np.angle(k_row))])
        cut_summaries[cut["name"]] = {
            "pointing_mae_deg": float(np.mean(errors)),
            "max_pointing_error_deg": float(np.max(errors)),
        }
        suffix = "" if single_cut else f"_{cut['name']}"
        emit(f"patterns_ideal{suffix}.csv", _write_pattern_table, grid,
             ideal_patterns, cut["axis"], first)
        emit(f"patterns_recon{suffix}.csv", _write_pattern_table, grid,
             recon_patterns, cut["axis"], first)

    emit("phase_matrix.csv", _write_float_matrix_csv, np.degrees(phases.values))
    emit("phase_map.csv", _write_float_matrix_csv,
         phase_to_grayscale(phases.values))
    emit("weight_matrix.csv", write_complex_csv, weights.values)
    emit("singular_values.csv", _write_csv, ["index", "sigma"],
         ([str(i), _fmt(v)] for i, v in enumerate(factors.sigma)))
    emit("compressed_matrix.csv", write_complex_csv, b.values)
    emit("reconstructed_matrix.csv", write_complex_csv, recon)
    emit("livg.csv", write_complex_csv, livg.c)
    rank = livg.rank
    emit("k_table.csv", _write_csv,
         ["direction_index", "cut", "steer_deg", "residual", "max_abs_k"]
         + [f"k{r}_mag" for r in range(rank)]
         + [f"k{r}_phase_deg" for r in range(rank)],
         iter(k_rows))
    emit("metrics.csv", _write_csv,
         ["direction_index", "cut", "steer_deg", "ideal_pointing_deg",
          "recon_pointing_deg", "pointing_error_deg", "ideal_psll_db",
          "recon_psll_db", "recon_peak_ratio"],
         iter(metric_rows))
    if pso_result is not None:
        emit("history.csv", _write_csv, ["iteration", "gbest_objective"],
             ([str(i), _fmt(v)] for i, v in enumerate(pso_result.history)))

    overall_mae = float(np.mean([row["pointing_mae_deg"]
                                 for row in cut_summaries.values()]))
    summary = {
        "name": scenario.name,
        "seed": scenario.seed,
        "grid_step_deg": scenario.grid_step_deg,
        "geometry": {"layout": scenario.geometry.layout,
                     "n_elements": scenario.geometry.n_elements,
                     "n_side": scenario.geometry.n_side,
                     "spacing": scenario.geometry.spacing},
        "scan": {"m_steps": scenario.scan.m_steps,
                 "theta_start_deg": scenario.scan.theta_start_deg,
                 "theta_end_deg": scenario.scan.theta_end_deg,
                 "phi_start_deg": scenario.scan.phi_start_deg,
                 "phi_end_deg": scenario.scan.phi_end_deg},
        "directions": scenario.m_total,
        "truncation": {"policy": scenario.truncation.kind,
                       "value": float(scenario.truncation.value),
                       "retained_rank": int(retained)},
        "energy_fraction": energy_fraction(factors, retained),
        "energy_fraction_squared": energy_fraction(factors, retained,
                                                   squared=True),
        "reconstruction_error": reconstruction_error(weights.values, b.values),
        "livg": {"source": scenario.livg_source,
                 "rank": int(rank),
                 "achieved_rank": int(numerical_rank(livg.c)),
                 "indices": (None if scenario.livg_source == "file"
                             else [int(i) for i in livg.row_indices])},
        "max_abs_k": float(np.abs(k_matrix).max()),
        "mean_residual": float(np.mean(residuals)),
        "max_residual": float(np.max(residuals)),
        "pointing_mae_deg": overall_mae,
        "cuts": cut_summaries,
    }
    if pso_result is not None:
        summary["pso"] = {
            "objective": float(pso_result.objective),
            "feasible": bool(pso_result.feasible),
            "swarm_size": scenario.pso.swarm_size,
            "iterations": scenario.pso.iterations,
            "k_bound": scenario.pso.k_bound,
        }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append("summary.json")

    manifest = {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "grid_step_deg": scenario.grid_step_deg,
        "files": {name: _sha256(out / name) for name in sorted(written)},
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return ScenarioResult(output_dir=out, summary=summary)

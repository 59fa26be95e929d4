"""Training-dataset generation: one swarm-optimized basis per grid cell.

Each record pairs a scan's weight matrix (fixed 128 directions, element
weights split into 16 real then 16 imaginary columns, zero-padded beyond N)
with the optimized basis rows (15 x 32, zero-padded below the rank) plus a
row-validity mask and self-describing metadata. Records are serialized one
JSON object per line; generation checkpoints a sidecar manifest after every
record so an interrupted run resumes from the last complete one.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from ._validation import ValidationError, require
from .arraymodel import ArrayGeometry, ScanPlan, build_phase_matrix, build_weight_matrix
from .compression import TruncationPolicy, svd, truncate
from .farfield import default_grid
from .pso import PsoConfig, make_objective_context, optimize

M_STEPS = 128
MAX_ELEMENTS = 16
MAX_RANK = 15
_DEFAULT_ANGLES = tuple(range(5, 90, 5))
_DEFAULT_ELEMENTS = tuple(range(4, 17))


@dataclass(frozen=True)
class DatasetRecord:
    """One (weight matrix -> optimized basis) training pair."""

    input: np.ndarray
    target: np.ndarray
    mask: np.ndarray
    meta: dict

    def __post_init__(self):
        object.__setattr__(self, "input", np.asarray(self.input, dtype=float))
        object.__setattr__(self, "target", np.asarray(self.target, dtype=float))
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))
        require(self.input.shape == (M_STEPS, 2 * MAX_ELEMENTS),
                "record.input", f"shape must be ({M_STEPS}, {2 * MAX_ELEMENTS})")
        require(self.target.shape == (MAX_RANK, 2 * MAX_ELEMENTS),
                "record.target", f"shape must be ({MAX_RANK}, {2 * MAX_ELEMENTS})")
        require(self.mask.shape == (MAX_RANK,), "record.mask",
                f"length must be {MAX_RANK}")
        require(isinstance(self.meta, dict), "record.meta", "must be a mapping")
        require(int(self.mask.sum()) == int(self.meta.get("rank", -1)),
                "record.mask", "true-count must equal meta rank")


@dataclass(frozen=True)
class DatasetSpec:
    """Validated generation grid and per-cell search budget."""

    seed: int
    angles_deg: tuple
    n_elements: tuple
    ranks: object  # "all" or a tuple of ints
    spacing: float
    pso_swarm_size: int
    pso_iterations: int
    grid_step_deg: float


def pad_complex_rows(rows, n_rows, n_cols=MAX_ELEMENTS):
    """Embed complex rows into (n_rows, 2*n_cols): real halves then imaginary."""
    rows = np.asarray(rows, dtype=complex)
    require(rows.ndim == 2, "pad.rows", "must be 2-D")
    r, n = rows.shape
    require(r <= n_rows, "pad.rows", f"row count must be <= {n_rows}")
    require(n <= n_cols, "pad.rows", f"row length must be <= {n_cols}")
    out = np.zeros((n_rows, 2 * n_cols))
    out[:r, :n] = rows.real
    out[:r, n_cols:n_cols + n] = rows.imag
    return out


def unpad_complex_rows(padded, n_rows, n_cols, total_cols=MAX_ELEMENTS):
    """Inverse of :func:`pad_complex_rows` for the valid block."""
    padded = np.asarray(padded, dtype=float)
    return (padded[:n_rows, :n_cols]
            + 1j * padded[:n_rows, total_cols:total_cols + n_cols])


def parse_dataset_spec(source):
    """Validate a YAML path or mapping into a :class:`DatasetSpec`."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.is_file():
            raise ValidationError(f"dataset spec: no such file '{path}'")
        data = yaml.safe_load(path.read_text())
    else:
        data = source
    require(isinstance(data, dict), "dataset", "must be a mapping")
    allowed = {"seed", "angles_deg", "n_elements", "ranks", "spacing",
               "pso", "grid"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValidationError(f"dataset.{unknown[0]}: unknown key")
    seed = data.get("seed", 0)
    require(isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0,
            "dataset.seed", "must be a nonnegative integer")
    angles = tuple(data.get("angles_deg", _DEFAULT_ANGLES))
    require(len(angles) > 0, "dataset.angles_deg", "must be nonempty")
    for a in angles:
        require(isinstance(a, int) and 1 <= a <= 89, "dataset.angles_deg",
                "entries must be integers in [1, 89]")
    elements = tuple(data.get("n_elements", _DEFAULT_ELEMENTS))
    require(len(elements) > 0, "dataset.n_elements", "must be nonempty")
    for n in elements:
        require(isinstance(n, int) and 2 <= n <= MAX_ELEMENTS,
                "dataset.n_elements",
                f"entries must be integers in [2, {MAX_ELEMENTS}]")
    ranks = data.get("ranks", "all")
    if ranks != "all":
        require(isinstance(ranks, (list, tuple)) and len(ranks) > 0,
                "dataset.ranks", "must be 'all' or a nonempty list")
        for r in ranks:
            require(isinstance(r, int) and 1 <= r <= MAX_RANK, "dataset.ranks",
                    f"entries must be integers in [1, {MAX_RANK}]")
        ranks = tuple(ranks)
    spacing = float(data.get("spacing", 0.5))
    require(spacing > 0, "dataset.spacing", "must be > 0")
    pso = data.get("pso", {})
    require(isinstance(pso, dict), "dataset.pso", "must be a mapping")
    swarm = int(pso.get("swarm_size", 20))
    iterations = int(pso.get("iterations", 40))
    grid = data.get("grid", {})
    require(isinstance(grid, dict), "dataset.grid", "must be a mapping")
    step = float(grid.get("step_deg", 0.5))
    require(step > 0, "dataset.grid.step_deg", "must be > 0")
    return DatasetSpec(seed=seed, angles_deg=angles, n_elements=elements,
                       ranks=ranks, spacing=spacing, pso_swarm_size=swarm,
                       pso_iterations=iterations, grid_step_deg=step)


def enumerate_cells(spec):
    """(angle, n, rank) triples in generation order."""
    cells = []
    for angle in spec.angles_deg:
        for n in spec.n_elements:
            if spec.ranks == "all":
                eligible = range(2, n)
            else:
                eligible = [r for r in spec.ranks if r < n]
            for rank in eligible:
                cells.append((angle, n, rank))
    return cells


def cell_seed(base_seed, angle, n, rank):
    """Per-cell rng seed derived so parallel order never changes content."""
    seq = np.random.SeedSequence([int(base_seed), int(angle), int(n), int(rank)])
    return int(seq.generate_state(1)[0])


def generate_record(spec, angle, n, rank):
    """Run one grid cell's swarm search and pack the result as a record."""
    geometry = ArrayGeometry.linear(n, spacing=spec.spacing)
    scan = ScanPlan(M_STEPS, 0.0, float(angle))
    weights = build_weight_matrix(build_phase_matrix(geometry, scan))
    b = truncate(svd(weights.values), TruncationPolicy.fixed_rank(rank))
    seed = cell_seed(spec.seed, angle, n, rank)
    ctx = make_objective_context(weights.values, b.values, geometry,
                                 grid_deg=default_grid(spec.grid_step_deg),
                                 rank=rank)
    config = PsoConfig(swarm_size=spec.pso_swarm_size,
                       iterations=spec.pso_iterations, rng_seed=seed)
    result = optimize(ctx, config)
    mask = np.zeros(MAX_RANK, dtype=bool)
    mask[:rank] = True
    return DatasetRecord(
        input=pad_complex_rows(weights.values, M_STEPS),
        target=pad_complex_rows(result.livg.c, MAX_RANK),
        mask=mask,
        meta={"scan_angle_deg": int(angle), "n_elements": int(n),
              "rank": int(rank), "seed": seed,
              "row_indices": [int(i) for i in result.livg.row_indices],
              "objective": float(result.objective),
              "feasible": bool(result.feasible)})


def record_to_json(record):
    """One-line JSON form; floats keep full repr so parsing is lossless."""
    payload = {"input": record.input.tolist(),
               "target": record.target.tolist(),
               "mask": [bool(v) for v in record.mask],
               "meta": record.meta}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def record_from_json(line):
    """Parse one JSONL line back into a validated :class:`DatasetRecord`."""
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"record: not valid JSON ({exc})") from exc
    for key in ("input", "target", "mask", "meta"):
        require(key in payload, f"record.{key}", "required key is missing")
    return DatasetRecord(input=payload["input"], target=payload["target"],
                         mask=payload["mask"], meta=payload["meta"])


def load_dataset(path):
    """All records of a JSONL dataset file."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"dataset: no such file '{path}'")
    records = []
    with path.open() as handle:
        for line in handle:
            if line.strip():
                records.append(record_from_json(line))
    return records


def _fingerprint(spec, cells):
    blob = json.dumps({"seed": spec.seed, "spacing": spec.spacing,
                       "swarm_size": spec.pso_swarm_size,
                       "iterations": spec.pso_iterations,
                       "grid_step_deg": spec.grid_step_deg,
                       "cells": cells}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class DatasetResult:
    """Output location plus how much work this invocation actually did."""

    path: Path
    total: int
    resumed_from: int


def generate_dataset(spec, out_path, progress=None):
    """Generate (or resume) the dataset at `out_path` for a spec.

    A sidecar `<out>.manifest.json` records the completed-record count and a
    hash of the completed prefix after every record; rerunning with the same
    spec continues from the last complete record, and a spec change restarts
    cleanly. `progress`, if given, is called as progress(done, total, cell).
    """
    if not isinstance(spec, DatasetSpec):
        spec = parse_dataset_spec(spec)
    cells = enumerate_cells(spec)
    require(len(cells) > 0, "dataset", "grid is empty (no eligible ranks)")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    manifest_path = Path(str(out_path) + ".manifest.json")
    fingerprint = _fingerprint(spec, [list(c) for c in cells])

    done = 0
    prefix_lines = []
    if manifest_path.is_file() and out_path.is_file():
        try:
            manifest = json.loads(manifest_path.read_text())
        except json.JSONDecodeError:
            manifest = {}
        if manifest.get("fingerprint") == fingerprint:
            claimed = int(manifest.get("complete", 0))
            lines = out_path.read_text().splitlines(keepends=True)
            candidate = lines[:claimed]
            digest = hashlib.sha256("".join(candidate).encode()).hexdigest()
            if len(candidate) == claimed and digest == manifest.get("prefix_sha256"):
                done = claimed
                prefix_lines = candidate

    digest_state = hashlib.sha256("".join(prefix_lines).encode())
    resumed_from = done
    with out_path.open("w") as handle:
        handle.writelines(prefix_lines)
        handle.flush()
        for index in range(done, len(cells)):
            angle, n, rank = cells[index]
            record = generate_record(spec, angle, n, rank)
            line = record_to_json(record) + "\n"
            handle.write(line)
            handle.flush()
            digest_state.update(line.encode())
            manifest = {"fingerprint": fingerprint,
                        "complete": index + 1,
                        "total": len(cells),
                        "prefix_sha256": digest_state.hexdigest()}
            manifest_path.write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n")
            if progress is not None:
                progress(index + 1, len(cells), cells[index])
    return DatasetResult(path=out_path, total=len(cells),
                         resumed_from=resumed_from)

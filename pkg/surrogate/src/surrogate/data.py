"""Dataset records: JSONL parsing, the seeded split, and padded-row helpers."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ._errors import DataError, is_int, require
from .config import (INPUT_COLS, INPUT_ROWS, MAX_ELEMENTS, TARGET_COLS,
                     TARGET_ROWS)
from .tokens import patchify


@dataclass
class DatasetRecord:
    """One training example: padded input/target matrices plus bookkeeping."""

    input: np.ndarray
    target: np.ndarray
    mask: np.ndarray
    meta: dict = field(default_factory=dict)


def _as_matrix(value, shape, name):
    arr = np.asarray(value, dtype=float)
    if arr.shape != shape or not np.all(np.isfinite(arr)):
        raise DataError(f"{name}: must be a finite {shape[0]}x{shape[1]} matrix")
    return arr


def record_from_json(line):
    """Parse one JSONL line into a :class:`DatasetRecord`.

    The line must carry ``input`` (128x32, element columns as real halves
    then imaginary halves, zero-padded past the element count), ``target``
    (15x32 padded basis rows), a 15-entry boolean ``mask`` whose true rows
    are the valid targets, and a ``meta`` object.
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataError(f"record: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise DataError("record: must be a JSON object")
    for key in ("input", "target", "mask"):
        if key not in data:
            raise DataError(f"record.{key}: missing")
    matrix = _as_matrix(data["input"], (INPUT_ROWS, INPUT_COLS), "record.input")
    target = _as_matrix(data["target"], (TARGET_ROWS, TARGET_COLS), "record.target")
    mask = data["mask"]
    if (not isinstance(mask, list) or len(mask) != TARGET_ROWS
            or not all(isinstance(m, bool) for m in mask)):
        raise DataError(f"record.mask: must be a list of {TARGET_ROWS} booleans")
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise DataError("record.mask: must mark at least one valid row")
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise DataError("record.meta: must be an object")
    return DatasetRecord(input=matrix, target=target, mask=mask, meta=meta)


def load_records(path):
    """Read a JSONL dataset file written by the dataset-generator CLI."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"dataset: no such file '{path}'")
    records = []
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(record_from_json(line))
        except DataError as exc:
            raise DataError(f"{path}:{number}: {exc}") from None
    return records


def split_records(records, val_fraction, seed):
    """Split records into (train, validation) by a seeded shuffle.

    The validation side gets ``round(len * val_fraction)`` records, never
    all of them; a single-record dataset trains on that record alone.
    """
    require(0 < val_fraction < 1, "val_fraction", "must be strictly between 0 and 1")
    if not records:
        raise DataError("dataset: contains no records")
    order = np.random.default_rng(seed).permutation(len(records))
    n_val = min(int(round(len(records) * val_fraction)), len(records) - 1)
    val = [records[i] for i in order[:n_val]]
    train = [records[i] for i in order[n_val:]]
    return train, val


def to_tensors(records):
    """Stack records into (tokens, targets, masks) torch tensors."""
    if not records:
        raise DataError("dataset: contains no records")
    tokens = np.stack([patchify(r.input) for r in records])
    targets = np.stack([r.target for r in records])
    masks = np.stack([r.mask for r in records])
    return (torch.tensor(tokens, dtype=torch.float32),
            torch.tensor(targets, dtype=torch.float32),
            torch.tensor(masks, dtype=torch.bool))


def rows_from_padded(padded, rank, n_elements=MAX_ELEMENTS):
    """Recombine a padded 15x32 real block into `rank` complex rows.

    Row ``r`` of the result is ``padded[r, :n_elements] + 1j *
    padded[r, 16:16 + n_elements]``, dropping the zero padding.
    """
    arr = np.asarray(padded, dtype=float)
    require(arr.shape == (TARGET_ROWS, TARGET_COLS), "padded",
            f"must have shape ({TARGET_ROWS}, {TARGET_COLS})")
    require(is_int(rank) and 1 <= rank <= TARGET_ROWS, "rank",
            f"must be an integer in [1, {TARGET_ROWS}]")
    require(is_int(n_elements) and 1 <= n_elements <= MAX_ELEMENTS, "n_elements",
            f"must be an integer in [1, {MAX_ELEMENTS}]")
    real = arr[:rank, :n_elements]
    imag = arr[:rank, MAX_ELEMENTS:MAX_ELEMENTS + n_elements]
    return real + 1j * imag


def write_complex_csv(path, rows):
    """Write complex rows as real columns then imaginary columns.

    This is the matrix layout the beam-basis scenario runner reads for
    file-sourced bases: header ``re0..re{n-1},im0..im{n-1}``, one row per
    basis row.
    """
    arr = np.asarray(rows, dtype=complex)
    require(arr.ndim == 2 and arr.size > 0, "rows", "must be a nonempty 2-D matrix")
    n = arr.shape[1]
    header = [f"re{j}" for j in range(n)] + [f"im{j}" for j in range(n)]
    lines = [",".join(header)]
    for row in arr:
        lines.append(",".join(repr(float(v))
                              for v in np.concatenate([row.real, row.imag])))
    Path(path).write_text("\n".join(lines) + "\n")

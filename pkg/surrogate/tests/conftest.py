"""Shared builders for synthetic dataset records in the generator's layout."""

import json

import numpy as np

import surrogate as sg


def synth_record(rng, n_elements=4, rank=2, angle=30):
    """Random record with the padded input/target layout of generated files."""
    matrix = np.zeros((sg.INPUT_ROWS, sg.INPUT_COLS))
    matrix[:, :n_elements] = rng.standard_normal((sg.INPUT_ROWS, n_elements))
    matrix[:, sg.MAX_ELEMENTS:sg.MAX_ELEMENTS + n_elements] = (
        rng.standard_normal((sg.INPUT_ROWS, n_elements)))
    target = np.zeros((sg.TARGET_ROWS, sg.TARGET_COLS))
    target[:rank, :n_elements] = rng.standard_normal((rank, n_elements))
    target[:rank, sg.MAX_ELEMENTS:sg.MAX_ELEMENTS + n_elements] = (
        rng.standard_normal((rank, n_elements)))
    mask = np.zeros(sg.TARGET_ROWS, dtype=bool)
    mask[:rank] = True
    meta = {"scan_angle_deg": int(angle), "n_elements": int(n_elements),
            "rank": int(rank), "seed": 1}
    return sg.DatasetRecord(input=matrix, target=target, mask=mask, meta=meta)


def record_line(record):
    """Serialize a record the way the generator CLI writes JSONL lines."""
    return json.dumps({"input": record.input.tolist(),
                       "target": record.target.tolist(),
                       "mask": [bool(m) for m in record.mask],
                       "meta": record.meta},
                      sort_keys=True, separators=(",", ":"))


def write_dataset(path, records):
    """Write records as a JSONL file."""
    path.write_text("\n".join(record_line(r) for r in records) + "\n")

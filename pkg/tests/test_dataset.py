"""Unit tests for training-pair packing and dataset generation."""

import json

import numpy as np
import pytest

import beambasis as bb
from beambasis import ValidationError
from beambasis.dataset import (M_STEPS, MAX_ELEMENTS, MAX_RANK, cell_seed,
                               enumerate_cells, pad_complex_rows,
                               record_from_json, record_to_json,
                               unpad_complex_rows)

TINY = {
    "angles_deg": [20],
    "n_elements": [5],
    "ranks": [2, 3],
    "pso": {"swarm_size": 6, "iterations": 4},
    "grid": {"step_deg": 2.0},
}


def manual_record(rank=4, seed=0):
    rng = np.random.default_rng(seed)
    mask = np.zeros(MAX_RANK, dtype=bool)
    mask[:rank] = True
    return bb.DatasetRecord(
        input=rng.standard_normal((M_STEPS, 2 * MAX_ELEMENTS)),
        target=rng.standard_normal((MAX_RANK, 2 * MAX_ELEMENTS)),
        mask=mask,
        meta={"rank": rank, "scan_angle_deg": 30, "n_elements": 16,
              "seed": 7, "row_indices": [0, 1, 2, 3], "objective": 0.25,
              "feasible": True})


class TestPadding:
    """Complex-row embedding into fixed real blocks."""

    def test_round_trip(self):
        """pad then unpad recovers the original rows."""
        rng = np.random.default_rng(1)
        for trial in range(10):
            r = int(rng.integers(1, 6))
            n = int(rng.integers(2, MAX_ELEMENTS + 1))
            rows = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
            padded = pad_complex_rows(rows, MAX_RANK)
            assert padded.shape == (MAX_RANK, 2 * MAX_ELEMENTS)
            assert np.array_equal(unpad_complex_rows(padded, r, n), rows)

    def test_unused_block_is_zero(self):
        """Columns past the row length stay zero in both halves."""
        rows = np.ones((2, 8), dtype=complex) * (1 + 2j)
        padded = pad_complex_rows(rows, 15)
        assert np.all(padded[:2, 8:16] == 0)
        assert np.all(padded[:2, 24:32] == 0)
        assert np.all(padded[2:] == 0)

    def test_oversized_rows_rejected(self):
        """Rows longer than the fixed block are refused."""
        with pytest.raises(ValidationError):
            pad_complex_rows(np.ones((2, 17), dtype=complex), 15)
        with pytest.raises(ValidationError):
            pad_complex_rows(np.ones((16, 4), dtype=complex), 15)


class TestRecordJson:
    """JSONL record serialization."""

    def test_round_trip_is_lossless(self):
        """to-json then from-json reproduces every field exactly."""
        record = manual_record()
        clone = record_from_json(record_to_json(record))
        assert np.array_equal(clone.input, record.input)
        assert np.array_equal(clone.target, record.target)
        assert np.array_equal(clone.mask, record.mask)
        assert clone.meta == record.meta

    def test_invalid_json_rejected(self):
        """A broken line reports a parse error."""
        with pytest.raises(ValidationError, match="not valid JSON"):
            record_from_json('{"input": [')

    def test_missing_key_rejected(self):
        """A record without a mask is refused."""
        payload = json.loads(record_to_json(manual_record()))
        del payload["mask"]
        with pytest.raises(ValidationError, match="mask"):
            record_from_json(json.dumps(payload))

    def test_bad_shape_rejected(self):
        """Wrongly sized input blocks are refused."""
        payload = json.loads(record_to_json(manual_record()))
        payload["input"] = [[0.0, 1.0], [2.0, 3.0]]
        with pytest.raises(ValidationError, match="shape"):
            record_from_json(json.dumps(payload))

    def test_mask_rank_mismatch_rejected(self):
        """The mask true-count must match the declared rank."""
        payload = json.loads(record_to_json(manual_record(rank=4)))
        payload["meta"]["rank"] = 5
        with pytest.raises(ValidationError, match="true-count"):
            record_from_json(json.dumps(payload))


class TestSpec:
    """Generation-spec parsing and cell enumeration."""

    def test_defaults(self):
        """An empty mapping yields the full default grid."""
        spec = bb.parse_dataset_spec({})
        assert spec.seed == 0
        assert spec.angles_deg == tuple(range(5, 90, 5))
        assert spec.n_elements == tuple(range(4, 17))
        assert spec.ranks == "all"
        assert spec.pso_swarm_size == 20
        assert spec.pso_iterations == 40
        assert spec.grid_step_deg == 0.5
        assert len(enumerate_cells(spec)) == 1768

    @pytest.mark.parametrize("data,fragment", [
        ({"bogus": 1}, "unknown key"),
        ({"seed": -1}, "seed"),
        ({"seed": True}, "seed"),
        ({"angles_deg": []}, "angles_deg"),
        ({"angles_deg": [0]}, "angles_deg"),
        ({"angles_deg": [90]}, "angles_deg"),
        ({"angles_deg": [30.5]}, "angles_deg"),
        ({"n_elements": [1]}, "n_elements"),
        ({"n_elements": [17]}, "n_elements"),
        ({"ranks": []}, "ranks"),
        ({"ranks": [0]}, "ranks"),
        ({"ranks": [16]}, "ranks"),
        ({"spacing": 0}, "spacing"),
        ({"grid": {"step_deg": 0}}, "step_deg"),
    ])
    def test_bad_specs_rejected(self, data, fragment):
        """Each malformed spec fails with a pointed message."""
        with pytest.raises(ValidationError, match=fragment):
            bb.parse_dataset_spec(data)

    def test_missing_spec_file_rejected(self, tmp_path):
        """A nonexistent spec path is an error."""
        with pytest.raises(ValidationError, match="no such file"):
            bb.parse_dataset_spec(tmp_path / "absent.yaml")

    def test_rank_list_filtered_per_element_count(self):
        """Listed ranks apply only where they stay below n."""
        spec = bb.parse_dataset_spec(
            {"angles_deg": [30], "n_elements": [4, 8], "ranks": [2, 5]})
        assert enumerate_cells(spec) == [(30, 4, 2), (30, 8, 2), (30, 8, 5)]

    def test_cell_seeds_deterministic_and_distinct(self):
        """Per-cell seeds depend on every coordinate."""
        assert cell_seed(0, 30, 16, 4) == cell_seed(0, 30, 16, 4)
        seeds = {cell_seed(0, 30, 16, 4), cell_seed(0, 30, 16, 5),
                 cell_seed(0, 30, 8, 4), cell_seed(0, 35, 16, 4),
                 cell_seed(1, 30, 16, 4)}
        assert len(seeds) == 5


class TestGenerateRecord:
    """Single-cell generation."""

    def test_cell_contents(self):
        """One cell yields a padded pair with consistent metadata."""
        spec = bb.parse_dataset_spec(dict(TINY, n_elements=[16], ranks=[4]))
        record = bb.generate_record(spec, 20, 16, 4)
        assert record.mask.sum() == 4
        assert record.meta["n_elements"] == 16
        assert record.meta["scan_angle_deg"] == 20
        assert len(record.meta["row_indices"]) == 4
        assert all(0 <= i < M_STEPS for i in record.meta["row_indices"])
        assert np.all(record.target[4:] == 0)

    def test_small_arrays_are_zero_padded(self):
        """An 8-element cell leaves columns 8..15 and 24..31 empty."""
        spec = bb.parse_dataset_spec(dict(TINY, n_elements=[8], ranks=[3]))
        record = bb.generate_record(spec, 20, 8, 3)
        assert np.all(record.input[:, 8:16] == 0)
        assert np.all(record.input[:, 24:32] == 0)
        assert np.any(record.input[:, :8] != 0)
        rows = unpad_complex_rows(record.target, 3, 8)
        assert np.linalg.matrix_rank(rows) == 3


class TestGenerateDataset:
    """Whole-grid generation with checkpointed resume."""

    def test_one_shot(self, tmp_path):
        """A tiny grid lands every record plus a complete sidecar."""
        out = tmp_path / "data.jsonl"
        calls = []
        result = bb.generate_dataset(TINY, out,
                                     progress=lambda d, t, c: calls.append(c))
        assert result.total == 2
        assert result.resumed_from == 0
        assert calls == [(20, 5, 2), (20, 5, 3)]
        records = bb.load_dataset(out)
        assert [r.meta["rank"] for r in records] == [2, 3]
        sidecar = json.loads((tmp_path / "data.jsonl.manifest.json").read_text())
        assert sidecar["complete"] == sidecar["total"] == 2

    def test_interrupted_run_resumes_identically(self, tmp_path):
        """Aborting after one record and rerunning matches a clean run."""
        reference = tmp_path / "ref.jsonl"
        bb.generate_dataset(TINY, reference)
        out = tmp_path / "data.jsonl"

        def bomb(done, total, cell):
            if done == 1:
                raise RuntimeError("simulated crash")

        with pytest.raises(RuntimeError):
            bb.generate_dataset(TINY, out, progress=bomb)
        assert len(out.read_text().splitlines()) == 1
        result = bb.generate_dataset(TINY, out)
        assert result.resumed_from == 1
        assert out.read_bytes() == reference.read_bytes()

    def test_corrupted_tail_is_discarded(self, tmp_path):
        """Garbage past the recorded prefix is dropped on resume."""
        reference = tmp_path / "ref.jsonl"
        bb.generate_dataset(TINY, reference)
        out = tmp_path / "data.jsonl"
        bb.generate_dataset(TINY, out)
        with out.open("a") as handle:
            handle.write('{"partial": ')
        result = bb.generate_dataset(TINY, out)
        assert result.resumed_from == 2
        assert out.read_bytes() == reference.read_bytes()

    def test_spec_change_restarts(self, tmp_path):
        """A different seed invalidates the checkpoint entirely."""
        out = tmp_path / "data.jsonl"
        bb.generate_dataset(TINY, out)
        result = bb.generate_dataset(dict(TINY, seed=1), out)
        assert result.resumed_from == 0

    def test_empty_grid_rejected(self, tmp_path):
        """Ranks that never fit under any element count are an error."""
        spec = dict(TINY, n_elements=[4], ranks=[5])
        with pytest.raises(ValidationError, match="empty"):
            bb.generate_dataset(spec, tmp_path / "data.jsonl")

    def test_load_missing_dataset_rejected(self, tmp_path):
        """Loading a nonexistent dataset file is an error."""
        with pytest.raises(ValidationError, match="no such file"):
            bb.load_dataset(tmp_path / "absent.jsonl")

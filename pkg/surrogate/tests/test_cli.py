"""End-to-end checks of the command-line interface."""

import subprocess

import numpy as np
import pytest

import surrogate as sg
from surrogate.cli import main
from conftest import synth_record, write_dataset

TRAIN_ARGS = ["--encoder-layers", "1", "--heads", "2", "--model-width", "16",
              "--coarse-epochs", "2", "--fine-epochs", "1",
              "--batch-size", "4", "--seed", "3"]


@pytest.fixture()
def dataset(tmp_path):
    rng = np.random.default_rng(30)
    path = tmp_path / "tiny.jsonl"
    write_dataset(path, [synth_record(rng) for _ in range(8)])
    return path


def train_once(dataset, tmp_path):
    out = tmp_path / "run"
    code = main(["train", str(dataset), "--out", str(out)] + TRAIN_ARGS)
    assert code == 0
    return out


class TestTrainCommand:
    """surrogate train."""

    def test_writes_checkpoint_and_metrics(self, dataset, tmp_path, capsys):
        """Training emits per-epoch lines and persists both artifacts."""
        out = train_once(dataset, tmp_path)
        captured = capsys.readouterr().out
        assert "[1/3] coarse" in captured
        assert "[3/3] fine" in captured
        assert "saved:" in captured
        assert (out / "model.pt").is_file()
        metrics = (out / "metrics.jsonl").read_text().splitlines()
        assert len(metrics) == 3

    def test_missing_dataset_exits_2(self, tmp_path, capsys):
        """A nonexistent dataset is a usage error."""
        code = main(["train", str(tmp_path / "absent.jsonl")] + TRAIN_ARGS)
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_config_exits_2(self, dataset, tmp_path, capsys):
        """An indivisible width/head pair is a usage error."""
        code = main(["train", str(dataset), "--out", str(tmp_path / "x"),
                     "--heads", "3", "--model-width", "16"])
        assert code == 2
        assert "divisible" in capsys.readouterr().err


class TestEvalCommand:
    """surrogate eval."""

    def test_reports_metrics(self, dataset, tmp_path, capsys):
        """Evaluation prints the held-out metrics and split sizes."""
        out = train_once(dataset, tmp_path)
        capsys.readouterr()
        code = main(["eval", str(dataset), "--model", str(out / "model.pt")])
        captured = capsys.readouterr().out
        assert code == 0
        assert "validation mae:" in captured
        assert "cosine similarity:" in captured
        assert "split: train 7, val 1" in captured

    def test_missing_checkpoint_exits_2(self, dataset, tmp_path, capsys):
        """A nonexistent checkpoint is a usage error."""
        code = main(["eval", str(dataset), "--model",
                     str(tmp_path / "absent.pt")])
        assert code == 2
        assert "no such file" in capsys.readouterr().err


class TestInferCommand:
    """surrogate infer."""

    def test_writes_basis_csv(self, dataset, tmp_path, capsys):
        """Inference writes the re/im csv and reports independence."""
        out = train_once(dataset, tmp_path)
        capsys.readouterr()
        csv = tmp_path / "rows.csv"
        code = main(["infer", str(dataset), "--model", str(out / "model.pt"),
                     "--record", "0", "--rank", "2", "--out", str(csv)])
        captured = capsys.readouterr().out
        assert code == 0
        assert "independent:" in captured
        assert f"wrote: {csv}" in captured
        lines = csv.read_text().splitlines()
        assert lines[0] == "re0,re1,re2,re3,im0,im1,im2,im3"
        assert len(lines) == 3

    def test_record_out_of_range_exits_2(self, dataset, tmp_path, capsys):
        """Record indices outside the file are a usage error."""
        out = train_once(dataset, tmp_path)
        capsys.readouterr()
        code = main(["infer", str(dataset), "--model", str(out / "model.pt"),
                     "--record", "99", "--rank", "2"])
        assert code == 2
        assert "--record" in capsys.readouterr().err

    def test_rank_out_of_range_exits_2(self, dataset, tmp_path, capsys):
        """Rank past the padded 15 rows is a usage error."""
        out = train_once(dataset, tmp_path)
        capsys.readouterr()
        code = main(["infer", str(dataset), "--model", str(out / "model.pt"),
                     "--rank", "16", "--out", str(tmp_path / "r.csv")])
        assert code == 2
        assert "rank" in capsys.readouterr().err


class TestEntryPoint:
    """The installed console script and parser plumbing."""

    def test_help_runs(self):
        """`surrogate --help` exits cleanly and lists the subcommands."""
        result = subprocess.run(["surrogate", "--help"],
                                capture_output=True, text=True)
        assert result.returncode == 0
        for name in ("train", "eval", "infer"):
            assert name in result.stdout

    def test_missing_subcommand_is_a_parser_error(self):
        """No subcommand raises through argparse."""
        with pytest.raises(SystemExit):
            main([])

"""Command-line interface: train, eval, and infer subcommands."""

import argparse
import sys
from pathlib import Path

from ._errors import DataError, StateError, ValidationError
from .config import SurrogateConfig
from .data import load_records, write_complex_csv
from .infer import infer_livg
from .training import (eval_split, load_checkpoint, save_checkpoint, train,
                       write_metrics)

_CONFIG_FIELDS = ("encoder_layers", "heads", "model_width", "coarse_lr",
                  "coarse_epochs", "fine_lr", "fine_epochs", "batch_size",
                  "val_fraction", "seed")


def _config_from_args(args):
    overrides = {}
    for name in _CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return SurrogateConfig(**overrides)


def _cmd_train(args):
    records = load_records(args.dataset)
    config = _config_from_args(args)
    total = config.coarse_epochs + config.fine_epochs

    def report(entry):
        val = "-" if entry["val_mae"] is None else f"{entry['val_mae']:.6f}"
        cos = ("-" if entry["cosine_similarity"] is None
               else f"{entry['cosine_similarity']:.4f}")
        print(f"[{entry['epoch']}/{total}] {entry['phase']} "
              f"train {entry['train_mae']:.6f} val {val} cosine {cos}")

    result = train(records, config, progress=report)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out / "model.pt", result)
    write_metrics(out / "metrics.jsonl", result.history)
    print(f"records: {len(records)} (train {result.train_size}, "
          f"val {result.val_size})")
    print(f"saved: {out / 'model.pt'}")
    print(f"metrics: {out / 'metrics.jsonl'}")
    return 0


def _cmd_eval(args):
    records = load_records(args.dataset)
    result = load_checkpoint(args.model)
    report = eval_split(result.model, records, result.config)
    print(f"validation mae: {report.mae:.6f}")
    print(f"cosine similarity: {report.cosine_similarity:.6f}")
    print(f"split: train {report.train_size}, val {report.val_size}")
    return 0


def _cmd_infer(args):
    records = load_records(args.dataset)
    if not 0 <= args.record < len(records):
        raise ValidationError(
            f"--record: must be in [0, {len(records) - 1}]")
    record = records[args.record]
    n_elements = (args.elements if args.elements is not None
                  else int(record.meta.get("n_elements", 16)))
    result = load_checkpoint(args.model)
    inference = infer_livg(result.model, record.input, args.rank, n_elements)
    write_complex_csv(args.out, inference.rows)
    print(f"record {args.record}: rank {args.rank}, {n_elements} elements")
    print(f"independent: {'yes' if inference.independent else 'no'}")
    if not inference.independent:
        print("warning: predicted rows are numerically dependent",
              file=sys.stderr)
    print(f"wrote: {args.out}")
    return 0


def build_parser():
    """Construct the argparse parser for the `surrogate` entry point."""
    parser = argparse.ArgumentParser(
        prog="surrogate",
        description="Train and apply an encoder surrogate that predicts "
                    "swarm-optimized beam-basis rows from weight matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="train a surrogate on a dataset file")
    train_p.add_argument("dataset", help="JSONL dataset from the generator CLI")
    train_p.add_argument("--out", default="out/surrogate",
                         help="directory for model.pt and metrics.jsonl")
    train_p.add_argument("--encoder-layers", dest="encoder_layers", type=int)
    train_p.add_argument("--heads", type=int)
    train_p.add_argument("--model-width", dest="model_width", type=int)
    train_p.add_argument("--coarse-lr", dest="coarse_lr", type=float)
    train_p.add_argument("--coarse-epochs", dest="coarse_epochs", type=int)
    train_p.add_argument("--fine-lr", dest="fine_lr", type=float)
    train_p.add_argument("--fine-epochs", dest="fine_epochs", type=int)
    train_p.add_argument("--batch-size", dest="batch_size", type=int)
    train_p.add_argument("--val-fraction", dest="val_fraction", type=float)
    train_p.add_argument("--seed", type=int)
    train_p.set_defaults(handler=_cmd_train)

    eval_p = sub.add_parser("eval", help="report held-out metrics for a checkpoint")
    eval_p.add_argument("dataset", help="JSONL dataset the model was trained on")
    eval_p.add_argument("--model", required=True, help="checkpoint path")
    eval_p.set_defaults(handler=_cmd_eval)

    infer_p = sub.add_parser("infer", help="predict basis rows for one record")
    infer_p.add_argument("dataset", help="JSONL dataset file")
    infer_p.add_argument("--model", required=True, help="checkpoint path")
    infer_p.add_argument("--record", type=int, default=0,
                         help="record index within the dataset (default 0)")
    infer_p.add_argument("--rank", type=int, required=True,
                         help="basis rows to keep (1..15)")
    infer_p.add_argument("--elements", type=int,
                         help="element count (default: the record's)")
    infer_p.add_argument("--out", default="livg.csv",
                         help="output csv path (default livg.csv)")
    infer_p.set_defaults(handler=_cmd_infer)
    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValidationError, DataError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

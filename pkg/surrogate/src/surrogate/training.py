"""Two-phase training, masked-entry metrics, and checkpoint io."""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import torch

from ._errors import DataError, require
from .config import EvalReport, SurrogateConfig
from .data import split_records, to_tensors
from .model import LivgSurrogate


def masked_mae(predicted, target, mask):
    """Mean absolute error over the entries of masked rows only."""
    require(predicted.shape == target.shape, "masked_mae",
            "predicted and target must have matching shapes")
    weights = mask.unsqueeze(-1).to(predicted.dtype)
    count = weights.sum() * target.shape[-1]
    require(float(count) > 0, "masked_mae", "mask must mark at least one row")
    return ((predicted - target).abs() * weights).sum() / count


def masked_cosine(predicted, target, mask):
    """Per-record cosine similarity over masked entries, averaged.

    Records where either masked vector has zero norm contribute 0.
    """
    values = []
    for row_pred, row_target, row_mask in zip(predicted, target, mask):
        p = row_pred[row_mask].reshape(-1)
        t = row_target[row_mask].reshape(-1)
        denom = float(p.norm() * t.norm())
        values.append(float(p @ t) / denom if denom > 0 else 0.0)
    mean = sum(values) / len(values)
    return min(1.0, max(-1.0, mean))


def _predict(model, tokens, batch_size=64):
    chunks = []
    with torch.no_grad():
        for start in range(0, tokens.shape[0], batch_size):
            chunks.append(model(tokens[start:start + batch_size]))
    return torch.cat(chunks, dim=0)


@dataclass
class TrainResult:
    """A trained model with its per-epoch history and split sizes."""

    model: LivgSurrogate
    history: list = field(default_factory=list)
    train_size: int = 0
    val_size: int = 0

    @property
    def config(self):
        return self.model.config


def evaluate(model, records, batch_size=64):
    """Masked MAE and averaged cosine over `records`; returns (mae, cosine)."""
    if not records:
        raise DataError("dataset: contains no records")
    tokens, targets, masks = to_tensors(records)
    model.eval()
    predicted = _predict(model, tokens, batch_size)
    return (float(masked_mae(predicted, targets, masks)),
            masked_cosine(predicted, targets, masks))


def eval_split(model, records, config):
    """Evaluate on the validation side of the config's seeded split."""
    train_records, val_records = split_records(
        records, config.val_fraction, config.seed)
    if not val_records:
        raise DataError("dataset: validation split is empty; need more records")
    mae, cosine = evaluate(model, val_records)
    return EvalReport(mae=mae, cosine_similarity=cosine,
                      train_size=len(train_records), val_size=len(val_records))


def train(records, config=None, progress=None):
    """Train a surrogate on dataset records, coarse phase then fine.

    The coarse phase runs AdamW at `config.coarse_lr`, the fine phase
    momentum SGD at `config.fine_lr`. Every epoch appends a history entry
    ``{epoch, phase, train_mae, val_mae, cosine_similarity}`` with metrics
    recomputed over the full splits (validation entries are None when the
    split is empty) and passes it to `progress` when given. The same seed
    replays to an identical history.

    Parameters
    ----------
    records : list of DatasetRecord
    config : SurrogateConfig, optional
    progress : callable, optional
        Called with each history entry as it is appended.

    Returns
    -------
    TrainResult
    """
    config = config or SurrogateConfig()
    if not records:
        raise DataError("dataset: contains no records")
    torch.manual_seed(config.seed)
    train_records, val_records = split_records(
        records, config.val_fraction, config.seed)
    tokens, targets, masks = to_tensors(train_records)
    model = LivgSurrogate(config)
    history = []
    phases = (
        ("coarse",
         torch.optim.AdamW(model.parameters(), lr=config.coarse_lr,
                           weight_decay=config.weight_decay),
         config.coarse_epochs),
        ("fine",
         torch.optim.SGD(model.parameters(), lr=config.fine_lr,
                         momentum=config.fine_momentum),
         config.fine_epochs),
    )
    epoch = 0
    for phase, optimizer, epochs in phases:
        for _ in range(epochs):
            epoch += 1
            model.train()
            order = torch.randperm(tokens.shape[0])
            for start in range(0, tokens.shape[0], config.batch_size):
                batch = order[start:start + config.batch_size]
                loss = masked_mae(model(tokens[batch]), targets[batch],
                                  masks[batch])
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            model.eval()
            train_mae = float(masked_mae(_predict(model, tokens),
                                         targets, masks))
            if val_records:
                val_mae, cosine = evaluate(model, val_records)
            else:
                val_mae, cosine = None, None
            entry = {"epoch": epoch, "phase": phase, "train_mae": train_mae,
                     "val_mae": val_mae, "cosine_similarity": cosine}
            history.append(entry)
            if progress is not None:
                progress(entry)
    model.mark_fitted()
    model.eval()
    return TrainResult(model=model, history=history,
                       train_size=len(train_records),
                       val_size=len(val_records))


def save_checkpoint(path, result):
    """Serialize a :class:`TrainResult` (weights, config, history) to `path`."""
    payload = {"state_dict": result.model.state_dict(),
               "config": asdict(result.model.config),
               "history": result.history,
               "train_size": result.train_size,
               "val_size": result.val_size}
    torch.save(payload, path)


def load_checkpoint(path):
    """Load a checkpoint saved by :func:`save_checkpoint`."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"checkpoint: no such file '{path}'")
    payload = torch.load(path, weights_only=False)
    config = SurrogateConfig(**payload["config"])
    model = LivgSurrogate(config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return TrainResult(model=model, history=payload["history"],
                       train_size=payload["train_size"],
                       val_size=payload["val_size"])


def write_metrics(path, history):
    """Write the per-epoch history as one JSON object per line."""
    lines = [json.dumps(entry, sort_keys=True) for entry in history]
    Path(path).write_text("\n".join(lines) + "\n")

"""Encoder surrogate for swarm-optimized beam-basis selection.

Learns the weight-matrix -> independent-basis-rows regression from JSONL
training datasets produced by the beam-basis toolkit's dataset generator,
and predicts bases that the toolkit's scenario runner can consume as
file-sourced csv matrices.
"""

from ._errors import DataError, StateError, ValidationError
from .config import (INPUT_COLS, INPUT_ROWS, MAX_ELEMENTS, TARGET_COLS,
                     TARGET_ROWS, TOKEN_COUNT, TOKEN_LENGTH, EvalReport,
                     SurrogateConfig)
from .data import (DatasetRecord, load_records, record_from_json,
                   rows_from_padded, split_records, to_tensors,
                   write_complex_csv)
from .infer import InferenceResult, infer_livg, numerical_rank
from .model import (EncoderLayer, LivgSurrogate, MultiHeadAttention,
                    attention, attention_weights, multi_head)
from .tokens import patchify, unpatchify
from .training import (TrainResult, eval_split, evaluate, load_checkpoint,
                       masked_cosine, masked_mae, save_checkpoint, train,
                       write_metrics)

__all__ = [
    "DataError",
    "DatasetRecord",
    "EncoderLayer",
    "EvalReport",
    "INPUT_COLS",
    "INPUT_ROWS",
    "InferenceResult",
    "LivgSurrogate",
    "MAX_ELEMENTS",
    "MultiHeadAttention",
    "StateError",
    "SurrogateConfig",
    "TARGET_COLS",
    "TARGET_ROWS",
    "TOKEN_COUNT",
    "TOKEN_LENGTH",
    "TrainResult",
    "ValidationError",
    "attention",
    "attention_weights",
    "eval_split",
    "evaluate",
    "infer_livg",
    "load_checkpoint",
    "load_records",
    "masked_cosine",
    "masked_mae",
    "multi_head",
    "numerical_rank",
    "patchify",
    "record_from_json",
    "rows_from_padded",
    "save_checkpoint",
    "split_records",
    "to_tensors",
    "train",
    "unpatchify",
    "write_complex_csv",
    "write_metrics",
]

__version__ = "0.1.0"

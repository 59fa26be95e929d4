"""Basis-row prediction from a trained surrogate."""

from dataclasses import dataclass

import numpy as np
import torch

from ._errors import StateError
from .config import MAX_ELEMENTS
from .data import rows_from_padded
from .tokens import patchify


@dataclass
class InferenceResult:
    """Predicted basis rows plus an independence verdict.

    `independent` is False when the predicted rows are numerically rank
    deficient; callers should treat such a basis as unusable rather than
    solve against it silently.
    """

    rows: np.ndarray
    independent: bool
    predicted: np.ndarray


def numerical_rank(rows):
    """Matrix rank by SVD with the conventional max-dimension eps tolerance."""
    arr = np.asarray(rows, dtype=complex)
    singular = np.linalg.svd(arr, compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        return 0
    tolerance = max(arr.shape) * np.finfo(float).eps * singular[0]
    return int(np.sum(singular > tolerance))


def infer_livg(model, weight_matrix, rank, n_elements=MAX_ELEMENTS):
    """Predict a rank-`rank` basis for one padded weight matrix.

    The model predicts the full padded 15x32 target; the first `rank` rows
    are kept and recombined into complex rows of length `n_elements`.

    Parameters
    ----------
    model : LivgSurrogate
        Must be trained (or loaded from a checkpoint); otherwise a
        :class:`StateError` is raised.
    weight_matrix : array-like, shape (128, 32)
        Padded real/imaginary input in the dataset-record layout.
    rank : int
        Rows to keep, between 1 and 15.
    n_elements : int
        Element count of the underlying array, between 1 and 16.

    Returns
    -------
    InferenceResult
    """
    if not getattr(model, "is_fitted", False):
        raise StateError(
            "model: not trained; run train() or load a checkpoint first")
    tokens = torch.tensor(patchify(weight_matrix),
                          dtype=torch.float32).unsqueeze(0)
    model.eval()
    with torch.no_grad():
        predicted = model(tokens)[0].numpy().astype(float)
    rows = rows_from_padded(predicted, rank, n_elements)
    return InferenceResult(rows=rows,
                           independent=numerical_rank(rows) == rank,
                           predicted=predicted)

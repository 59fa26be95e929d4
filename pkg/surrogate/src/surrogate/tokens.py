"""Token reshaping between padded weight matrices and encoder input."""

import numpy as np

from ._errors import require
from .config import INPUT_COLS, INPUT_ROWS, TOKEN_COUNT, TOKEN_LENGTH


def patchify(matrix):
    """Reshape a 128x32 real matrix into 64 tokens of 64 features each.

    Token ``t`` is rows ``2t`` and ``2t + 1`` concatenated row-major, so the
    tokens tile the matrix exactly and :func:`unpatchify` inverts the reshape.

    Parameters
    ----------
    matrix : array-like, shape (128, 32)

    Returns
    -------
    ndarray, shape (64, 64)
    """
    arr = np.asarray(matrix, dtype=float)
    require(arr.shape == (INPUT_ROWS, INPUT_COLS), "matrix",
            f"must have shape ({INPUT_ROWS}, {INPUT_COLS}), got {arr.shape}")
    return arr.reshape(TOKEN_COUNT, TOKEN_LENGTH)


def unpatchify(tokens):
    """Invert :func:`patchify`, recovering the 128x32 matrix."""
    arr = np.asarray(tokens, dtype=float)
    require(arr.shape == (TOKEN_COUNT, TOKEN_LENGTH), "tokens",
            f"must have shape ({TOKEN_COUNT}, {TOKEN_LENGTH}), got {arr.shape}")
    return arr.reshape(INPUT_ROWS, INPUT_COLS)

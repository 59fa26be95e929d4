"""Independent-row basis (LIVG) selection and per-direction coefficient solving.

A LIVG is a small set of R rows picked from the compressed matrix B. Any
steering direction's weight row is then approximated as a complex combination
of those rows: the K-vector holds the R coefficients, solved by least squares.
Physically each coefficient is one variable-gain amplifier plus one phase
shifter, so R of them replace a full per-element feed network.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import ValidationError, as_complex_matrix, as_complex_vector, require

# Relative tolerance for the numerical linear-independence check.
INDEPENDENCE_TOL = 1e-9


@dataclass(frozen=True)
class Livg:
    """R selected rows of the compressed matrix plus their row indices."""

    row_indices: tuple
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=complex))
        object.__setattr__(self, "row_indices", tuple(int(i) for i in self.row_indices))
        require(self.c.ndim == 2, "livg.c", "must be 2-D")
        require(len(self.row_indices) == self.c.shape[0], "livg.row_indices",
                "count must match the row count of c")

    @property
    def rank(self):
        return self.c.shape[0]


@dataclass(frozen=True)
class KVector:
    """Complex combination coefficients for one direction, with the LS residual."""

    coefficients: np.ndarray
    residual: float

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           np.asarray(self.coefficients, dtype=complex))
        require(self.coefficients.ndim == 1, "k.coefficients", "must be 1-D")
        require(self.residual >= 0, "k.residual", "must be nonnegative")


def numerical_rank(matrix, tol=INDEPENDENCE_TOL):
    """Count of singular values above tol * sigma_max."""
    sigma = np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0:
        return 0
    return int(np.count_nonzero(sigma > tol * sigma[0]))


def select_livg(b, row_indices):
    """Pick rows `row_indices` of B and verify they are numerically independent.

    Raises a selection error on duplicate or out-of-range indices and a
    dependence error (reporting the achieved rank) when the selected rows do
    not reach full rank at the INDEPENDENCE_TOL relative tolerance.
    """
    values = as_complex_matrix(b, "select_livg.b")
    indices = [int(i) for i in row_indices]
    m = values.shape[0]
    require(len(indices) >= 1, "select_livg.row_indices", "must be nonempty")
    if len(set(indices)) != len(indices):
        raise ValidationError("select_livg.row_indices: duplicate index in selection")
    if min(indices) < 0 or max(indices) >= m:
        raise ValidationError(
            f"select_livg.row_indices: indices must lie in [0, {m})")
    c = values[indices]
    achieved = numerical_rank(c)
    if achieved < len(indices):
        raise ValidationError(
            f"select_livg.row_indices: selected rows are linearly dependent "
            f"(achieved rank {achieved} of {len(indices)})")
    return Livg(row_indices=tuple(indices), c=c)


def solve_k_batch(livg, rows):
    """Least-squares K for many target rows at once.

    rows is an (M, N) array; returns (coefficients, residuals) with
    coefficients of shape (M, R) and residuals the per-row Euclidean misfit
    norms. Solved through the SVD-based pseudoinverse of the basis.
    """
    rows = np.asarray(rows, dtype=complex)
    single = rows.ndim == 1
    rows = np.atleast_2d(rows)
    require(rows.shape[1] == livg.c.shape[1], "solve_k.target_row",
            "length must equal the element count")
    pinv = np.linalg.pinv(livg.c.T)
    coefficients = rows @ pinv.T
    misfit = coefficients @ livg.c - rows
    residuals = np.linalg.norm(misfit, axis=1)
    if single:
        return coefficients[0], float(residuals[0])
    return coefficients, residuals


def solve_k(livg, target_row):
    """Least-squares coefficients reconstructing one direction's weight row.

    Minimizes || sum_r k_r c_r - target ||_2; the residual conveys how far the
    target sits from the basis span (exactly zero, up to roundoff, for in-span
    targets).
    """
    target = as_complex_vector(target_row, "solve_k.target_row")
    coefficients, residual = solve_k_batch(livg, target)
    return KVector(coefficients=coefficients, residual=residual)


def reconstruct_row(livg, k):
    """Weight row sum_r coefficients[r] * c_r for a solved K-vector."""
    coeffs = k.coefficients if isinstance(k, KVector) else np.asarray(k, dtype=complex)
    require(coeffs.shape == (livg.rank,), "reconstruct_row.k",
            "coefficient count must equal the LIVG rank")
    return coeffs @ livg.c


def max_k_magnitude(k):
    """Largest coefficient magnitude, the quantity the gain bound constrains."""
    coeffs = k.coefficients if isinstance(k, KVector) else np.asarray(k, dtype=complex)
    if coeffs.size == 0:
        return 0.0
    return float(np.abs(coeffs).max())

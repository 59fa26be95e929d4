"""Scikit-learn style estimators wrapping the compression and basis pipeline.

Both estimators treat the M x N complex weight matrix as the data: rows are
samples (steering directions), columns are features (elements). Fitting
learns a low-rank representation; transform maps rows into it.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import as_complex_matrix
from .arraymodel import ArrayGeometry
from .compression import TruncationPolicy, energy_fraction, svd, truncate, truncation_rank
from .livg import select_livg, solve_k_batch
from .pso import PsoConfig, make_objective_context, optimize


def _check_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"This {type(estimator).__name__} instance is not fitted yet. "
            "Call 'fit' before using this method.")


class SvdCompressor(BaseEstimator, TransformerMixin):
    """Project weight-matrix rows onto their dominant right singular subspace.

    Parameters
    ----------
    policy : str, default "rank"
        Truncation rule: "rank", "threshold", or "energy".
    value : float, default 4
        Rank to keep, absolute singular-value floor, or energy fraction,
        depending on `policy`.

    Attributes
    ----------
    singular_values_ : ndarray
        Full singular spectrum of the fitted matrix.
    rank_ : int
        Number of singular values the policy kept.
    components_ : ndarray
        Retained right singular vectors, shape (rank_, n_features).
    """

    def __init__(self, policy="rank", value=4):
        self.policy = policy
        self.value = value

    def fit(self, X, y=None):
        factors = svd(as_complex_matrix(X, "X"))
        policy = TruncationPolicy(kind=self.policy, value=self.value)
        self.rank_ = truncation_rank(factors, policy)
        self.singular_values_ = factors.sigma.copy()
        self.components_ = factors.v[:, :self.rank_].conj().T
        self.n_features_in_ = factors.v.shape[0]
        return self

    def transform(self, X):
        """Denoise rows by projection; fit_transform(A) is the compressed matrix B."""
        _check_fitted(self, "components_")
        values = as_complex_matrix(X, "X")
        basis = self.components_.conj().T
        return (values @ basis) @ basis.conj().T

    def energy_fraction_(self, squared=False):
        """Singular-value weight fraction captured by the kept rank."""
        _check_fitted(self, "singular_values_")
        sigma = self.singular_values_
        weights = sigma ** 2 if squared else sigma
        return float(weights[:self.rank_].sum() / weights.sum())


class LivgTransformer(BaseEstimator, TransformerMixin):
    """Learn an independent-row beam basis; transform rows to coefficients.

    fit(X) compresses the matrix to `rank` singular values, selects `rank`
    rows of the compressed matrix (equally spaced, explicit, or swarm
    optimized), and stores them as `components_`. transform(X) solves the
    least-squares coefficients of each row against the basis;
    inverse_transform maps coefficients back to weight rows.

    Parameters
    ----------
    rank : int, default 4
        Basis size (and the truncation rank).
    selection : str, default "equally-spaced"
        "equally-spaced", "explicit" (requires `indices`), or "pso".
    indices : sequence of int or None
        Row indices for the explicit selection.
    spacing : float, default 0.5
        Element pitch in wavelengths, used by the swarm's pattern objective.
    grid_step_deg : float, default 0.05
        Evaluation grid step for the swarm objective.
    swarm_size, iterations : int
        Swarm budget for selection="pso".
    random_state : int, default 0
        Seed for the swarm.
    """

    def __init__(self, rank=4, selection="equally-spaced", indices=None,
                 spacing=0.5, grid_step_deg=0.05, swarm_size=50,
                 iterations=200, random_state=0):
        self.rank = rank
        self.selection = selection
        self.indices = indices
        self.spacing = spacing
        self.grid_step_deg = grid_step_deg
        self.swarm_size = swarm_size
        self.iterations = iterations
        self.random_state = random_state

    def fit(self, X, y=None):
        values = as_complex_matrix(X, "X")
        m = values.shape[0]
        factors = svd(values)
        b = truncate(factors, TruncationPolicy.fixed_rank(self.rank))
        self.singular_values_ = factors.sigma.copy()
        self.energy_fraction_ = energy_fraction(factors, self.rank)
        if self.selection == "equally-spaced":
            chosen = np.round(np.linspace(0, m - 1, self.rank)).astype(int)
        elif self.selection == "explicit":
            if self.indices is None:
                raise ValueError("indices is required for selection='explicit'")
            chosen = np.asarray(self.indices, dtype=int)
        elif self.selection == "pso":
            geometry = ArrayGeometry.linear(values.shape[1], spacing=self.spacing)
            from .farfield import default_grid
            ctx = make_objective_context(
                values, b, geometry, grid_deg=default_grid(self.grid_step_deg),
                rank=self.rank)
            config = PsoConfig(swarm_size=self.swarm_size,
                               iterations=self.iterations,
                               rng_seed=self.random_state)
            result = optimize(ctx, config)
            self.objective_history_ = result.history
            self.objective_ = result.objective
            chosen = np.asarray(result.indices, dtype=int)
        else:
            raise ValueError(
                "selection must be 'equally-spaced', 'explicit', or 'pso'")
        livg = select_livg(b, chosen)
        self.livg_ = livg
        self.row_indices_ = np.asarray(livg.row_indices, dtype=int)
        self.components_ = livg.c.copy()
        self.n_features_in_ = values.shape[1]
        return self

    def transform(self, X):
        """Coefficient matrix (n_rows, rank): least-squares K per row."""
        _check_fitted(self, "components_")
        values = as_complex_matrix(X, "X")
        coefficients, _ = solve_k_batch(self.livg_, values)
        return coefficients

    def inverse_transform(self, K):
        """Weight rows reconstructed from coefficients: K @ components_."""
        _check_fitted(self, "components_")
        return np.asarray(K, dtype=complex) @ self.components_

    def residuals(self, X):
        """Per-row least-squares misfit norms against the fitted basis."""
        _check_fitted(self, "components_")
        values = as_complex_matrix(X, "X")
        _, residuals = solve_k_batch(self.livg_, values)
        return residuals

"""SVD compression of weight matrices: truncation policies and energy metrics."""

from dataclasses import dataclass

import numpy as np

from ._validation import ValidationError, as_complex_matrix, require
from .arraymodel import WeightMatrix

# Numerical-rank floor, relative to the largest singular value.
RANK_FLOOR = 1e-12


@dataclass(frozen=True)
class TruncatedSvd:
    """Full SVD factors A = U diag(sigma) V* with a recorded retained rank.

    u is M x M, v is N x N (columns are right singular vectors), sigma holds
    min(M, N) nonnegative values in descending order. retained_rank starts at
    the numerical rank (count of sigma above RANK_FLOOR * sigma[0]).
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    retained_rank: int

    def __post_init__(self):
        require(np.all(np.diff(self.sigma) <= 0), "svd.sigma",
                "must be sorted descending")
        require(np.all(self.sigma >= 0), "svd.sigma", "must be nonnegative")
        require(0 <= self.retained_rank <= len(self.sigma), "svd.retained_rank",
                "must lie in [0, min(M, N)]")

    @property
    def shape(self):
        return (self.u.shape[0], self.v.shape[0])


@dataclass(frozen=True)
class TruncationPolicy:
    """How many singular values survive truncation.

    kind is one of "rank" (keep the first `value` values), "threshold" (keep
    values >= `value`, an absolute floor), or "energy" (keep the smallest
    prefix whose energy fraction reaches `value`).
    """

    kind: str
    value: float

    def __post_init__(self):
        require(self.kind in ("rank", "threshold", "energy"),
                "truncation.policy", "must be 'rank', 'threshold', or 'energy'")
        if self.kind == "rank":
            require(float(self.value).is_integer() and self.value >= 1,
                    "truncation.value", "rank must be an integer >= 1")
        elif self.kind == "threshold":
            require(self.value >= 0, "truncation.value",
                    "threshold must be >= 0")
        else:
            require(0 < self.value <= 1, "truncation.value",
                    "energy fraction must lie in (0, 1]")

    @classmethod
    def fixed_rank(cls, r):
        return cls(kind="rank", value=int(r))

    @classmethod
    def threshold(cls, epsilon):
        return cls(kind="threshold", value=float(epsilon))

    @classmethod
    def energy(cls, fraction):
        return cls(kind="energy", value=float(fraction))


def svd(a):
    """Full complex SVD of a weight matrix (or bare 2-D array).

    Returns a :class:`TruncatedSvd`; retained_rank is initialized to the
    numerical rank at the RANK_FLOOR relative tolerance.
    """
    values = as_complex_matrix(a, "svd.input")
    try:
        u, sigma, vh = np.linalg.svd(values, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ValidationError(f"svd.input: decomposition failed ({exc})") from exc
    if sigma[0] > 0:
        rank = int(np.count_nonzero(sigma > RANK_FLOOR * sigma[0]))
    else:
        rank = 0
    return TruncatedSvd(u=u, sigma=sigma, v=vh.conj().T, retained_rank=rank)


def truncation_rank(factors, policy):
    """Number of singular values the policy keeps."""
    sigma = factors.sigma
    if policy.kind == "rank":
        r = int(policy.value)
        if r > len(sigma):
            raise ValidationError(
                f"truncation.value: rank {r} exceeds min(M, N) = {len(sigma)}")
        return r
    if policy.kind == "threshold":
        return int(np.count_nonzero(sigma >= policy.value))
    total = sigma.sum()
    if total == 0:
        raise ValidationError("truncation.value: energy policy undefined for an"
                              " all-zero spectrum")
    fractions = np.cumsum(sigma) / total
    return int(np.searchsorted(fractions, policy.value - 1e-15) + 1)


def truncate(factors, policy):
    """Compressed matrix B: singular values beyond the policy cut are zeroed.

    Returns a :class:`WeightMatrix` whose rows are no longer constant-modulus,
    so its amplitude_profile is None. The kept rank is `truncation_rank`.
    """
    rank = truncation_rank(factors, policy)
    sigma_cut = factors.sigma.copy()
    sigma_cut[rank:] = 0.0
    m, n = factors.shape
    k = len(sigma_cut)
    b = (factors.u[:, :k] * sigma_cut) @ factors.v[:, :k].conj().T
    return WeightMatrix(values=b)


def energy_fraction(factors, r, squared=False):
    """Fraction of singular-value weight carried by the first r values.

    The default is the ratio of sums, sum(sigma[:r]) / sum(sigma); pass
    squared=True for the ratio of squared values (the Frobenius-energy
    variant, useful for sensitivity checks).
    """
    sigma = factors.sigma
    require(0 <= r <= len(sigma), "energy_fraction.r",
            "must lie in [0, len(sigma)]")
    weights = sigma ** 2 if squared else sigma
    total = weights.sum()
    if total == 0:
        raise ValidationError(
            "energy_fraction: undefined for an all-zero spectrum")
    return float(weights[:r].sum() / total)


def reconstruction_error(a, b):
    """Frobenius norm of A - B."""
    a_vals = as_complex_matrix(a, "reconstruction_error.a")
    b_vals = as_complex_matrix(b, "reconstruction_error.b")
    require(a_vals.shape == b_vals.shape, "reconstruction_error.b",
            "shape must match a")
    return float(np.linalg.norm(a_vals - b_vals))

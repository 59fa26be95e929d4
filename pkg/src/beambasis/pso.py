"""Particle-swarm search over LIVG row selections under the gain bound.

Particles live in a continuous R-dimensional box [0, M-1]^R of row-index
coordinates; each evaluation repairs a position to R distinct sorted integer
indices, builds the candidate basis from the compressed matrix, solves every
direction's coefficients, and scores the reconstruction against the ideal
patterns. The gain bound max|K| < k_bound enters as an exterior penalty so
infeasible particles still feel pressure toward feasibility.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import ValidationError, as_complex_matrix, require
from .farfield import default_grid, steering_matrix
from .livg import INDEPENDENCE_TOL, Livg, KVector, numerical_rank, select_livg, solve_k_batch

DEFAULT_K_BOUND = 20.0
DEFAULT_PENALTY_WEIGHT = 10.0
# Finite score handed to selections whose rows are numerically dependent.
DEPENDENT_PENALTY = 1e6


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters. v_max defaults to m_steps / 10 when None."""

    swarm_size: int = 50
    iterations: int = 200
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    v_max: float | None = None
    k_bound: float = DEFAULT_K_BOUND
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT
    rng_seed: int = 0

    def __post_init__(self):
        require(int(self.swarm_size) >= 2, "pso.swarm_size", "must be >= 2")
        require(int(self.iterations) >= 1, "pso.iterations", "must be >= 1")
        require(0.0 <= self.inertia <= 1.0, "pso.inertia", "must lie in [0, 1]")
        require(self.cognitive >= 0, "pso.cognitive", "must be >= 0")
        require(self.social >= 0, "pso.social", "must be >= 0")
        if self.v_max is not None:
            require(self.v_max > 0, "pso.v_max", "must be > 0")
        require(self.k_bound > 0, "pso.k_bound", "must be > 0")
        require(self.penalty_weight >= 0, "pso.penalty_weight", "must be >= 0")


@dataclass(frozen=True)
class ObjectiveContext:
    """Precomputed quantities shared by every objective evaluation.

    a_values / b_values are the ideal and compressed M x N matrices;
    grid_deg is the evaluation grid; rank is the LIVG size searched for;
    b_fields holds the complex pattern field of every compressed row
    (grid x M), and ideal_pointing_deg / ideal_peak the per-direction
    main-lobe references extracted from the ideal rows.
    """

    a_values: np.ndarray
    b_values: np.ndarray
    geometry: object
    grid_deg: np.ndarray
    rank: int
    amp_weight: float = 1.0
    angle_weight: float = 1.0
    b_fields: np.ndarray = field(repr=False, default=None)
    ideal_pointing_deg: np.ndarray = field(repr=False, default=None)
    ideal_peak: np.ndarray = field(repr=False, default=None)

    @property
    def m_steps(self):
        return self.a_values.shape[0]


def make_objective_context(a, b, geometry, grid_deg=None, rank=None,
                           amp_weight=1.0, angle_weight=1.0):
    """Build an :class:`ObjectiveContext` from ideal and compressed matrices.

    rank defaults to the numerical rank of the compressed matrix at the
    independence tolerance, which is the natural LIVG size for a
    rank-truncated matrix. Only linear layouts are supported for
    pattern-objective search.
    """
    a_values = as_complex_matrix(a, "objective.a")
    b_values = as_complex_matrix(b, "objective.b")
    require(a_values.shape == b_values.shape, "objective.b",
            "shape must match the ideal matrix")
    require(geometry.layout == "linear", "geometry.layout",
            "pso objective supports linear scans only")
    require(a_values.shape[1] == geometry.n_elements, "objective.a",
            "column count must equal the element count")
    grid = default_grid() if grid_deg is None else np.asarray(grid_deg, dtype=float)
    if rank is None:
        rank = numerical_rank(b_values, INDEPENDENCE_TOL)
    require(1 <= rank <= min(b_values.shape), "objective.rank",
            "must lie in [1, min(M, N)]")
    d = steering_matrix(grid, geometry)
    ideal_af = np.abs(d @ a_values.T)
    return ObjectiveContext(
        a_values=a_values, b_values=b_values, geometry=geometry,
        grid_deg=grid, rank=int(rank),
        amp_weight=float(amp_weight), angle_weight=float(angle_weight),
        b_fields=d @ b_values.T,
        ideal_pointing_deg=grid[np.argmax(ideal_af, axis=0)],
        ideal_peak=ideal_af.max(axis=0))


def repair_position(raw, m_steps):
    """Continuous coordinates -> R distinct sorted integer row indices.

    Clips to [0, M-1], rounds to the nearest integer, and resolves duplicates
    by stepping to the nearest unused in-range index (trying +1, -1, +2, -2,
    and so on).
    """
    raw = np.asarray(raw, dtype=float)
    r = raw.size
    if r > m_steps:
        raise ValidationError(
            f"repair_position: {r} indices cannot be distinct within [0, {m_steps})")
    rounded = np.rint(np.clip(raw, 0, m_steps - 1)).astype(int)
    used = set()
    repaired = []
    for value in rounded:
        if value not in used:
            used.add(value)
            repaired.append(value)
            continue
        placed = False
        for magnitude in range(1, m_steps + 1):
            for candidate in (value + magnitude, value - magnitude):
                if 0 <= candidate < m_steps and candidate not in used:
                    used.add(candidate)
                    repaired.append(candidate)
                    placed = True
                    break
            if placed:
                break
        if not placed:  # r <= m_steps guarantees a free slot exists
            raise RuntimeError("repair_position: no unused index found")
    return np.array(sorted(repaired), dtype=int)


def _solve_selection(indices, ctx):
    """SVD-backed pseudoinverse solve for one selection.

    Returns (k_matrix M x R, max|K|) or None when the selected rows are
    numerically dependent.
    """
    c = ctx.b_values[indices]
    u, s, vh = np.linalg.svd(c.T, full_matrices=False)
    if s[0] == 0 or np.count_nonzero(s > INDEPENDENCE_TOL * s[0]) < len(indices):
        return None
    inv_s = np.where(s > INDEPENDENCE_TOL * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    pinv = (vh.conj().T * inv_s) @ u.conj().T
    k_matrix = ctx.b_values @ pinv.T
    return k_matrix, float(np.abs(k_matrix).max())


def objective(indices, ctx, k_bound=DEFAULT_K_BOUND,
              penalty_weight=DEFAULT_PENALTY_WEIGHT):
    """Average pattern mismatch plus the gain-bound exterior penalty.

    Base term: sum over directions of amp_weight * |ideal - reconstructed
    main-lobe magnitude| (linear, normalized by the ideal peak) plus
    angle_weight * |pointing difference in degrees|, divided by 2M. Penalty:
    penalty_weight * max(0, max|K| - k_bound). Dependent selections score
    DEPENDENT_PENALTY instead of raising.
    """
    indices = np.asarray(indices, dtype=int)
    solved = _solve_selection(indices, ctx)
    if solved is None:
        return DEPENDENT_PENALTY
    k_matrix, max_k = solved
    recon_af = np.abs(ctx.b_fields[:, indices] @ k_matrix.T)
    amp_term = np.abs(1.0 - recon_af.max(axis=0) / ctx.ideal_peak)
    angle_term = np.abs(ctx.ideal_pointing_deg
                        - ctx.grid_deg[np.argmax(recon_af, axis=0)])
    base = (ctx.amp_weight * amp_term.sum()
            + ctx.angle_weight * angle_term.sum()) / (2.0 * ctx.m_steps)
    return float(base + penalty_weight * max(0.0, max_k - k_bound))


@dataclass
class PsoState:
    """Swarm positions/velocities plus personal and global bests."""

    positions: np.ndarray
    velocities: np.ndarray
    p_best_positions: np.ndarray
    p_best_values: np.ndarray
    g_best_position: np.ndarray
    g_best_value: float
    iteration: int = 0


def _evaluate(positions, ctx, config):
    values = np.empty(positions.shape[0])
    for s in range(positions.shape[0]):
        indices = repair_position(positions[s], ctx.m_steps)
        values[s] = objective(indices, ctx, k_bound=config.k_bound,
                              penalty_weight=config.penalty_weight)
    return values


def init_state(ctx, config, rng):
    """Uniform random positions over [0, M-1], zero velocities, bests evaluated."""
    shape = (config.swarm_size, ctx.rank)
    positions = rng.uniform(0.0, ctx.m_steps - 1.0, size=shape)
    values = _evaluate(positions, ctx, config)
    best = int(np.argmin(values))
    return PsoState(
        positions=positions,
        velocities=np.zeros(shape),
        p_best_positions=positions.copy(),
        p_best_values=values,
        g_best_position=positions[best].copy(),
        g_best_value=float(values[best]),
        iteration=0)


def pso_step(state, config, ctx, rng):
    """One velocity/position update with strict-improvement best tracking.

    Draws two fresh uniform [0, 1] values per particle-dimension (cognitive
    then social) from `rng`; velocities are clamped to [-v_max, v_max] and
    positions to [0, M-1].
    """
    v_max = config.v_max if config.v_max is not None else ctx.m_steps / 10.0
    r_cognitive = rng.random(state.positions.shape)
    r_social = rng.random(state.positions.shape)
    state.velocities = (config.inertia * state.velocities
                        + config.cognitive * r_cognitive
                        * (state.p_best_positions - state.positions)
                        + config.social * r_social
                        * (state.g_best_position[None, :] - state.positions))
    np.clip(state.velocities, -v_max, v_max, out=state.velocities)
    state.positions = np.clip(state.positions + state.velocities,
                              0.0, ctx.m_steps - 1.0)
    values = _evaluate(state.positions, ctx, config)
    improved = values < state.p_best_values
    state.p_best_positions[improved] = state.positions[improved]
    state.p_best_values[improved] = values[improved]
    best = int(np.argmin(state.p_best_values))
    if state.p_best_values[best] < state.g_best_value:
        state.g_best_value = float(state.p_best_values[best])
        state.g_best_position = state.p_best_positions[best].copy()
    state.iteration += 1
    return state


@dataclass(frozen=True)
class PsoResult:
    """Best selection found, its coefficient table, and the gBest trace."""

    indices: tuple
    objective: float
    history: np.ndarray
    livg: Livg
    k_matrix: np.ndarray
    residuals: np.ndarray
    max_k: float
    feasible: bool

    def k_vectors(self):
        """Per-direction KVector list (one per scan direction)."""
        return [KVector(coefficients=self.k_matrix[m], residual=float(self.residuals[m]))
                for m in range(self.k_matrix.shape[0])]


def optimize(ctx, config):
    """Run the swarm and return the best LIVG with its per-direction K table.

    The gBest objective trace has iterations + 1 entries (the initial swarm
    evaluation, then one per step) and is nonincreasing. The result's
    `feasible` flag reports whether the best selection meets the gain bound;
    an infeasible best is returned flagged, never silently.
    """
    if ctx.rank > ctx.m_steps:
        raise ValidationError(
            f"objective.rank: {ctx.rank} rows cannot be distinct within "
            f"[0, {ctx.m_steps})")
    rng = np.random.default_rng(config.rng_seed)
    state = init_state(ctx, config, rng)
    history = np.empty(config.iterations + 1)
    history[0] = state.g_best_value
    for i in range(config.iterations):
        pso_step(state, config, ctx, rng)
        history[i + 1] = state.g_best_value
    indices = repair_position(state.g_best_position, ctx.m_steps)
    try:
        livg = select_livg(ctx.b_values, indices)
    except ValidationError as exc:
        raise RuntimeError(
            "optimize: no linearly independent selection found at this rank"
        ) from exc
    k_matrix, residuals = solve_k_batch(livg, ctx.b_values)
    max_k = float(np.abs(k_matrix).max())
    return PsoResult(
        indices=tuple(int(i) for i in indices),
        objective=float(state.g_best_value),
        history=history,
        livg=livg,
        k_matrix=k_matrix,
        residuals=residuals,
        max_k=max_k,
        feasible=bool(max_k < config.k_bound))

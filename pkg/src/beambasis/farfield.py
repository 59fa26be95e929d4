"""Far-field array factors, main-lobe extraction, and pointing statistics.

The array factor of a weight row w on a linear array is
AF(theta) = | sum_n d_n(theta) w_n | with steering element
d_n = e^{+j*n*2*pi*spacing*sin(theta)}; since ideal weights carry e^{-j*phase}
(see :mod:`beambasis.arraymodel`), the ideal row steered to theta_m peaks at
theta_m. Planar arrays evaluate the flattened 2-D steering vector along a
(theta, phi) cut path.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import ValidationError, as_complex_vector, require
from .arraymodel import delta_phi, planar_phase_rows

# Patterns flatter than this relative span are flagged degenerate.
FLATNESS_TOL = 1e-12


def default_grid(step_deg=0.05, start_deg=-90.0, stop_deg=90.0):
    """Uniform angle grid, inclusive of both ends (3601 samples by default)."""
    require(step_deg > 0, "grid.step_deg", "must be > 0")
    require(stop_deg > start_deg, "grid.stop_deg", "must be > start_deg")
    count = int(round((stop_deg - start_deg) / step_deg)) + 1
    return np.linspace(start_deg, stop_deg, count)


@dataclass(frozen=True)
class FarFieldPattern:
    """Array-factor magnitude on a strictly increasing angle grid.

    af_linear holds |AF|; af_db is max-normalized, 20*log10(af / max).
    For planar cut patterns theta_grid_deg holds the swept cut parameter
    (theta along a pitch cut, phi along an azimuth cut).
    """

    theta_grid_deg: np.ndarray
    af_linear: np.ndarray
    af_db: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.theta_grid_deg, dtype=float)
        af = np.asarray(self.af_linear, dtype=float)
        object.__setattr__(self, "theta_grid_deg", grid)
        object.__setattr__(self, "af_linear", af)
        object.__setattr__(self, "af_db", np.asarray(self.af_db, dtype=float))
        require(grid.size > 0, "pattern.theta_grid_deg", "must be nonempty")
        require(np.all(np.diff(grid) > 0), "pattern.theta_grid_deg",
                "must be strictly increasing")
        require(np.all(af >= 0), "pattern.af_linear", "must be nonnegative")


@dataclass(frozen=True)
class BeamMetrics:
    """Main-lobe summary of one pattern, optionally against a reference angle."""

    pointing_deg: float
    mainlobe_mag: float
    psll_db: float | None = None
    pointing_error_deg: float | None = None
    degenerate: bool = False


def steering_vector(theta_deg, geometry):
    """Steering elements e^{+j*n*delta_phi(theta)} for a linear array."""
    require(geometry.layout == "linear", "geometry.layout",
            "must be linear (use steering_vector_2d for planar)")
    dphi = delta_phi(theta_deg, geometry.spacing)
    return np.exp(1j * dphi * np.arange(geometry.n_elements))


def steering_vector_2d(theta_deg, phi_deg, geometry):
    """Flattened planar steering vector for direction (theta, phi)."""
    require(geometry.layout == "planar", "geometry.layout", "must be planar")
    row = planar_phase_rows(geometry.n_side, [theta_deg], [phi_deg],
                            geometry.spacing)[0]
    return np.exp(1j * row)


def steering_matrix(grid_deg, geometry):
    """Stacked linear steering vectors, one grid angle per row (G x N)."""
    require(geometry.layout == "linear", "geometry.layout", "must be linear")
    grid = np.asarray(grid_deg, dtype=float)
    dphi = delta_phi(grid, geometry.spacing)
    return np.exp(1j * np.outer(dphi, np.arange(geometry.n_elements)))


def steering_matrix_2d(theta_deg, phi_deg, geometry):
    """Stacked planar steering vectors along a (theta, phi) path (G x N^2)."""
    require(geometry.layout == "planar", "geometry.layout", "must be planar")
    rows = planar_phase_rows(geometry.n_side, theta_deg, phi_deg,
                             geometry.spacing)
    return np.exp(1j * rows)


def _pattern_from_field(grid_deg, field):
    af = np.abs(field)
    peak = af.max()
    if peak > 0:
        ratio = af / peak
    else:
        ratio = np.ones_like(af)
    af_db = 20.0 * np.log10(np.maximum(ratio, 1e-300))
    return FarFieldPattern(theta_grid_deg=grid_deg, af_linear=af, af_db=af_db)


def array_factor(weights, grid_deg, geometry):
    """Far-field pattern of one weight row over a theta grid (linear array)."""
    w = as_complex_vector(weights, "array_factor.weights")
    require(w.shape[0] == geometry.n_elements, "array_factor.weights",
            "length must equal the element count")
    grid = np.asarray(grid_deg, dtype=float)
    if grid.size == 0:
        raise ValidationError("array_factor.grid: must be nonempty")
    field = steering_matrix(grid, geometry) @ w
    return _pattern_from_field(grid, field)


def pitch_cut(weights, grid_deg, geometry, phi_deg=0.0):
    """Planar pattern along theta at fixed phi; the grid parameter is theta."""
    w = as_complex_vector(weights, "pitch_cut.weights")
    grid = np.asarray(grid_deg, dtype=float)
    field = steering_matrix_2d(grid, np.full_like(grid, phi_deg), geometry) @ w
    return _pattern_from_field(grid, field)


def azimuth_cut(weights, grid_deg, geometry, theta_deg):
    """Planar pattern along phi at fixed theta; the grid parameter is phi."""
    w = as_complex_vector(weights, "azimuth_cut.weights")
    grid = np.asarray(grid_deg, dtype=float)
    field = steering_matrix_2d(np.full_like(grid, theta_deg), grid, geometry) @ w
    return _pattern_from_field(grid, field)


def _is_degenerate(af):
    peak = af.max()
    if peak <= 0:
        return True
    return (peak - af.min()) <= FLATNESS_TOL * peak


def main_lobe(pattern):
    """(pointing_deg, mainlobe_mag) at the global maximum; ties take the smaller angle."""
    af = pattern.af_linear
    peak_index = int(np.argmax(af))
    return float(pattern.theta_grid_deg[peak_index]), float(af[peak_index])


def _mainlobe_bounds(af, peak_index):
    # Walk downhill (non-increasing) from the peak to the first local minimum
    # on each side; those minima bound the main-lobe region, inclusive.
    left = peak_index
    while left > 0 and af[left - 1] <= af[left]:
        left -= 1
    right = peak_index
    last = len(af) - 1
    while right < last and af[right + 1] <= af[right]:
        right += 1
    return left, right


def peak_sidelobe_level(pattern):
    """Largest af_db outside the main-lobe region, or None when nothing lies outside."""
    af = pattern.af_linear
    if _is_degenerate(af):
        return None
    peak_index = int(np.argmax(af))
    left, right = _mainlobe_bounds(af, peak_index)
    outside = np.concatenate([pattern.af_db[:left], pattern.af_db[right + 1:]])
    if outside.size == 0:
        return None
    return float(outside.max())


def beam_metrics(pattern, reference_deg=None):
    """Bundle pointing, main-lobe magnitude, PSLL, and optional pointing error."""
    pointing, mag = main_lobe(pattern)
    error = None if reference_deg is None else abs(pointing - float(reference_deg))
    return BeamMetrics(pointing_deg=pointing, mainlobe_mag=mag,
                       psll_db=peak_sidelobe_level(pattern),
                       pointing_error_deg=error,
                       degenerate=_is_degenerate(pattern.af_linear))


def pointing_mae(ideal, recon):
    """Mean absolute pointing difference between two metric lists, degrees."""
    require(len(ideal) == len(recon), "pointing_mae.recon",
            "length must match ideal")
    require(len(ideal) >= 1, "pointing_mae.ideal", "must be nonempty")
    ideal_pt = np.array([getattr(m, "pointing_deg", m) for m in ideal], dtype=float)
    recon_pt = np.array([getattr(m, "pointing_deg", m) for m in recon], dtype=float)
    return float(np.abs(ideal_pt - recon_pt).mean())

"""Array geometry, scan plans, and steering phase/weight matrices.

The steering model is the classic uniform-pitch progressive phase: element n
of a linear array steered to theta gets phase n * delta_phi(theta, spacing)
with delta_phi = 2*pi*spacing*sin(theta), spacing in wavelengths. A scan plan
samples M directions; stacking the per-direction element phases gives an
M x N phase matrix, and the complex weight matrix holds
amplitude * e^{-j*phase} per entry (the far-field steering vector carries the
conjugate sign, see :mod:`beambasis.farfield`).

Planar (n_side x n_side) arrays use the same model on a flattened grid: the
element at grid position (i, j) gets i*dphi1 + j*dphi2 where dphi1/dphi2 are
the sin(theta)cos(phi) / sin(theta)sin(phi) projections, flattened row-major.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import ValidationError, as_float_array, require

TWO_PI = 2.0 * np.pi


def wrap_phase(radians):
    """Wrap phase(s) in radians to the half-open interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(radians, dtype=float), TWO_PI)


def wrap_degrees(degrees):
    """Wrap angle(s) in degrees to the half-open interval (-180, 180]."""
    return 180.0 - np.mod(180.0 - np.asarray(degrees, dtype=float), 360.0)


@dataclass(frozen=True)
class ArrayGeometry:
    """Element count, pitch (in wavelengths), and layout of the array.

    Parameters
    ----------
    n_elements : int
        Total element count N. For planar layouts this is n_side squared.
    spacing : float
        Element pitch as a fraction of the wavelength (d / lambda).
    layout : str
        "linear" or "planar".
    n_side : int or None
        Side length of a planar grid; None for linear layouts.
    """

    n_elements: int
    spacing: float = 0.5
    layout: str = "linear"
    n_side: int | None = None

    def __post_init__(self):
        require(int(self.n_elements) >= 1, "geometry.n_elements", "must be >= 1")
        require(self.spacing > 0, "geometry.spacing", "must be > 0")
        require(self.layout in ("linear", "planar"), "geometry.layout",
                "must be 'linear' or 'planar'")
        if self.layout == "planar":
            require(self.n_side is not None, "geometry.n_side",
                    "required for planar layout")
            require(self.n_side * self.n_side == self.n_elements,
                    "geometry.n_elements", "must equal n_side squared")
        else:
            require(self.n_side is None, "geometry.n_side",
                    "only valid for planar layout")

    @classmethod
    def linear(cls, n_elements, spacing=0.5):
        return cls(n_elements=int(n_elements), spacing=float(spacing), layout="linear")

    @classmethod
    def planar(cls, n_side, spacing=0.5):
        n_side = int(n_side)
        return cls(n_elements=n_side * n_side, spacing=float(spacing),
                   layout="planar", n_side=n_side)


@dataclass(frozen=True)
class ScanPlan:
    """M sampled steering directions.

    For linear layouts only the theta range matters. For planar layouts the
    plan is a paired path: direction m has theta_m and phi_m both sampled by
    linspace over their ranges, so a constant-phi pitch cut is simply a plan
    with phi_start_deg == phi_end_deg.

    Angles are sampled uniformly, inclusive of both endpoints; a single-step
    plan sits at the start angle.
    """

    m_steps: int
    theta_start_deg: float = 0.0
    theta_end_deg: float = 0.0
    phi_start_deg: float = 0.0
    phi_end_deg: float = 0.0

    def __post_init__(self):
        require(int(self.m_steps) >= 1, "scan.m_steps", "must be >= 1")
        require(self.theta_end_deg >= self.theta_start_deg,
                "scan.theta_end_deg", "must be >= theta_start_deg")
        for name in ("theta_start_deg", "theta_end_deg",
                     "phi_start_deg", "phi_end_deg"):
            value = getattr(self, name)
            require(-90.0 <= value <= 90.0, f"scan.{name}",
                    "must be within [-90, 90]")

    def theta_deg(self):
        """Sampled theta_m values, degrees."""
        return np.linspace(self.theta_start_deg, self.theta_end_deg, self.m_steps)

    def phi_deg(self):
        """Sampled phi_m values, degrees (planar paths)."""
        return np.linspace(self.phi_start_deg, self.phi_end_deg, self.m_steps)


@dataclass(frozen=True)
class PhaseMatrix:
    """M x N steering phases in radians, wrapped to (-pi, pi]."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        require(self.values.ndim == 2, "phase_matrix.values", "must be 2-D")


@dataclass(frozen=True)
class WeightMatrix:
    """M x N complex excitations, one steering direction per row.

    amplitude_profile is the per-element amplitude used at construction; it is
    None for matrices that are no longer constant-modulus per element (e.g.
    rank-truncated reconstructions).
    """

    values: np.ndarray
    amplitude_profile: np.ndarray | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        require(self.values.ndim == 2, "weight_matrix.values", "must be 2-D")
        if self.amplitude_profile is not None:
            profile = as_float_array(self.amplitude_profile,
                                     "weight_matrix.amplitude_profile")
            require(profile.shape == (self.values.shape[1],),
                    "weight_matrix.amplitude_profile",
                    "length must equal the element count")
            object.__setattr__(self, "amplitude_profile", profile)

    @property
    def shape(self):
        return self.values.shape


def cao_phase_offsets(n, base_deg, step_deg):
    """Linearly progressing phase offsets, degrees, wrapped to (-180, 180].

    Parameters
    ----------
    n : int
        Element count; must be >= 1.
    base_deg : float
        Phase of the first element.
    step_deg : float
        Increment applied per element (may be negative).

    Returns
    -------
    ndarray
        result[k] = base_deg + k * step_deg, wrapped.
    """
    if int(n) < 1:
        raise ValidationError("cao_phase_offsets.n: must be >= 1 (empty group)")
    return wrap_degrees(base_deg + step_deg * np.arange(int(n)))


def combine_weighted_groups(groups, ratios):
    """Superpose offset groups with power ratios into one complex weight list.

    Each group contributes sqrt(ratio) * e^{j*phase}; the sum is returned
    without renormalization.
    """
    if len(groups) == 0:
        raise ValidationError("combine_weighted_groups.groups: must be nonempty")
    require(len(ratios) == len(groups), "combine_weighted_groups.ratios",
            "count must match the group count")
    lengths = {len(g) for g in groups}
    require(len(lengths) == 1, "combine_weighted_groups.groups",
            "all groups must have the same length")
    ratios = as_float_array(ratios, "combine_weighted_groups.ratios")
    require(np.all(ratios >= 0), "combine_weighted_groups.ratios",
            "must be nonnegative")
    require(np.any(ratios > 0), "combine_weighted_groups.ratios",
            "at least one ratio must be positive (degenerate input)")
    combined = np.zeros(lengths.pop(), dtype=complex)
    for group, ratio in zip(groups, ratios):
        phases = np.deg2rad(as_float_array(group, "combine_weighted_groups.groups"))
        combined += np.sqrt(ratio) * np.exp(1j * phases)
    return combined


def delta_phi(theta_deg, spacing):
    """Per-element phase increment 2*pi*spacing*sin(theta), radians.

    theta_deg may be a scalar or an array; values must lie within [-90, 90].
    """
    theta = np.asarray(theta_deg, dtype=float)
    require(np.all(np.abs(theta) <= 90.0), "theta_deg", "must be within [-90, 90]")
    return TWO_PI * spacing * np.sin(np.deg2rad(theta))


def build_phase_matrix(geometry, scan_plan):
    """Phase matrix for a linear array: row m is [0, dphi_m, ..., (N-1)*dphi_m]."""
    require(geometry.layout == "linear", "geometry.layout",
            "must be linear (use build_phase_matrix_2d for planar)")
    dphi = delta_phi(scan_plan.theta_deg(), geometry.spacing)
    raw = np.outer(dphi, np.arange(geometry.n_elements))
    return PhaseMatrix(values=wrap_phase(raw))


def build_weight_matrix(phases, amplitude_profile=None):
    """Complex weights amplitude[n] * e^{-j*phase[m][n]} from a phase matrix.

    amplitude_profile defaults to all ones (ideal rows are pure phase ramps).
    """
    values = phases.values if isinstance(phases, PhaseMatrix) else np.asarray(phases, dtype=float)
    n = values.shape[1]
    if amplitude_profile is None:
        profile = np.ones(n)
    else:
        profile = as_float_array(amplitude_profile, "amplitude_profile")
        require(profile.shape == (n,), "amplitude_profile",
                "length must equal the element count")
        require(np.all(profile >= 0), "amplitude_profile", "must be nonnegative")
    return WeightMatrix(values=profile[None, :] * np.exp(-1j * values),
                        amplitude_profile=profile)


def delta_phi_2d(theta_deg, phi_deg, spacing):
    """Planar phase increments (dphi1, dphi2) for direction (theta, phi).

    dphi1 = 2*pi*spacing*sin(theta)*cos(phi) runs along the first grid index,
    dphi2 = 2*pi*spacing*sin(theta)*sin(phi) along the second.
    """
    theta = np.asarray(theta_deg, dtype=float)
    require(np.all(np.abs(theta) <= 90.0), "theta_deg", "must be within [-90, 90]")
    t = np.deg2rad(theta)
    p = np.deg2rad(np.asarray(phi_deg, dtype=float))
    return (TWO_PI * spacing * np.sin(t) * np.cos(p),
            TWO_PI * spacing * np.sin(t) * np.sin(p))


def planar_phase_rows(n_side, theta_deg, phi_deg, spacing):
    """Unwrapped flattened phases for directions (theta_deg[m], phi_deg[m]).

    Entry for grid element (i, j) is i*dphi1 + j*dphi2, flattened row-major
    over (i, j); returns an M x n_side^2 array.
    """
    d1, d2 = delta_phi_2d(theta_deg, phi_deg, spacing)
    d1 = np.atleast_1d(d1)
    d2 = np.atleast_1d(d2)
    i = np.arange(n_side)
    raw = d1[:, None, None] * i[:, None] + d2[:, None, None] * i[None, :]
    return raw.reshape(len(d1), n_side * n_side)


def build_phase_matrix_2d(geometry, scan_plan):
    """Phase matrix for a planar array over the plan's (theta, phi) path."""
    require(geometry.layout == "planar", "geometry.layout",
            "must be planar (use build_phase_matrix for linear)")
    raw = planar_phase_rows(geometry.n_side, scan_plan.theta_deg(),
                            scan_plan.phi_deg(), geometry.spacing)
    return PhaseMatrix(values=wrap_phase(raw))


def phase_to_grayscale(phase_values):
    """Map wrapped phases to grayscale: -180 deg -> 0.0, +180 deg -> 1.0."""
    deg = np.rad2deg(np.asarray(phase_values, dtype=float))
    return (deg + 180.0) / 360.0

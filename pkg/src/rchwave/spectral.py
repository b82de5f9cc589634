"""Fourier collocation on the 2*pi-periodic interval.

Profiles of interest are even with zero mean, stored as pure cosine
coefficients a_k, k = 1..n_modes, so both constraints hold by
representation.  The collocation grid carries 2*n_modes uniform points;
quadratic products are formed on a zero-padded fine grid so that every
retained mode of a product is alias-free.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, SymmetryViolation

TOL_SYM = 1e-10  # evenness check, round-off scale for double precision

Field = np.ndarray


class Grid:
    """Uniform collocation grid x_j = pi*j/n_modes, j = 0..2*n_modes-1."""

    def __init__(self, n_modes: int = 64):
        if n_modes < 8:
            raise DomainError(f"n_modes must be >= 8, got {n_modes}")
        self.n_modes = int(n_modes)
        self.n_points = 2 * self.n_modes
        self.spacing = 2.0 * np.pi / self.n_points
        self.nodes = self.spacing * np.arange(self.n_points)
        # fine grid for dealiased quadratic products; 3N points leave the
        # top retained mode contaminated, hence the even +2 guard
        nf = 3 * self.n_modes + 2
        self.n_fine = nf + (nf % 2)
        self.fine_spacing = 2.0 * np.pi / self.n_fine
        self.fine_nodes = self.fine_spacing * np.arange(self.n_fine)
        self.wavenumbers = np.arange(1, self.n_modes + 1)

    def __repr__(self):
        return f"Grid(n_modes={self.n_modes})"

    def __eq__(self, other):
        return isinstance(other, Grid) and other.n_modes == self.n_modes

    def __hash__(self):
        return hash(("Grid", self.n_modes))

    @cached_property
    def cos_coarse(self) -> np.ndarray:
        """(n_points, n_modes) table cos(k x_j)."""
        return np.cos(np.outer(self.nodes, self.wavenumbers))

    @cached_property
    def cos_fine(self) -> np.ndarray:
        return np.cos(np.outer(self.fine_nodes, self.wavenumbers))

    @cached_property
    def sin_fine(self) -> np.ndarray:
        return np.sin(np.outer(self.fine_nodes, self.wavenumbers))

    @cached_property
    def analysis_coarse(self) -> np.ndarray:
        """(n_modes, n_points) map from even grid values to cosine coefficients.

        Discrete orthogonality on 2N points gives weight 2/M for k < N and
        1/M for the top mode k = N.
        """
        w = (2.0 / self.n_points) * self.cos_coarse.T.copy()
        w[-1, :] *= 0.5
        return w

    @cached_property
    def analysis_fine(self) -> np.ndarray:
        """(n_modes, n_fine) dealiased projection of a fine-grid field onto modes 1..N."""
        w = (2.0 / self.n_fine) * self.cos_fine.T.copy()
        return w

    def _trig_table(self, x: np.ndarray, derivative: bool) -> np.ndarray:
        """L2(0, 2*pi)-orthonormal trigonometric basis sampled at points x.

        Column order: constant, cos(kx) for k = 1..N, sin(kx) for
        k = 1..N-1 (the Nyquist sine vanishes on the collocation nodes).
        Continuum norms throughout; the top cosine's coarse-grid samples
        alias onto (-1)^j, so its grid quadrature weight differs (see
        field_to_coeffs).
        """
        n = self.n_modes
        cols = []
        if derivative:
            cols.append(np.zeros_like(x))
            for k in range(1, n + 1):
                cols.append(-k * np.sin(k * x) / np.sqrt(np.pi))
            for k in range(1, n):
                cols.append(k * np.cos(k * x) / np.sqrt(np.pi))
        else:
            cols.append(np.ones_like(x) / np.sqrt(2.0 * np.pi))
            for k in range(1, n + 1):
                cols.append(np.cos(k * x) / np.sqrt(np.pi))
            for k in range(1, n):
                cols.append(np.sin(k * x) / np.sqrt(np.pi))
        return np.stack(cols, axis=1)

    @cached_property
    def trig_grid(self) -> np.ndarray:
        """(n_points, n_points) orthonormal trig basis on the coarse nodes."""
        return self._trig_table(self.nodes, derivative=False)

    @cached_property
    def trig_fine(self) -> np.ndarray:
        return self._trig_table(self.fine_nodes, derivative=False)

    @cached_property
    def trig_fine_deriv(self) -> np.ndarray:
        return self._trig_table(self.fine_nodes, derivative=True)

    @cached_property
    def zero_mean_basis(self) -> np.ndarray:
        """Orthonormal basis of the zero-mean subspace (trig basis minus the constant)."""
        return self.trig_grid[:, 1:]

    def field_to_coeffs(self, values: Field) -> np.ndarray:
        """Coordinates of a grid field in the trig basis (exact on the span)."""
        raw = self.spacing * (self.trig_grid.T @ values)
        raw[self.n_modes] *= 0.5  # cos(N x): grid quadrature weight is 2 pi, not pi
        return raw

    def coeffs_to_field(self, coeffs: np.ndarray) -> Field:
        return self.trig_grid @ coeffs


@dataclass(frozen=True)
class WaveProfile:
    """Even zero-mean profile phi(x) = sum_k a_k cos(k x), k = 1..n_modes."""

    cos_coeffs: np.ndarray
    grid: Grid = field(default_factory=Grid)

    def __post_init__(self):
        coeffs = np.asarray(self.cos_coeffs, dtype=float)
        if coeffs.shape != (self.grid.n_modes,):
            raise ValueError(
                f"expected {self.grid.n_modes} cosine coefficients, got shape {coeffs.shape}"
            )
        object.__setattr__(self, "cos_coeffs", coeffs)


def synthesize(profile: WaveProfile) -> Field:
    """Evaluate the profile at the grid nodes."""
    return profile.grid.cos_coarse @ profile.cos_coeffs


def analyze_even(grid: Grid, values: Field, tol_sym: float = TOL_SYM) -> WaveProfile:
    """Project an even grid field onto cosine coefficients, dropping the mean.

    Raises SymmetryViolation when the odd part of the input exceeds
    tol_sym relative to its sup-norm.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n_points,):
        raise ValueError(f"field has wrong length {values.shape} for {grid}")
    reflected = values[(-np.arange(grid.n_points)) % grid.n_points]
    odd = 0.5 * (values - reflected)
    scale = np.max(np.abs(values))
    if scale > 0.0 and np.max(np.abs(odd)) > tol_sym * scale:
        raise SymmetryViolation(
            f"odd part {np.max(np.abs(odd)):.3e} exceeds {tol_sym:.1e} * {scale:.3e}"
        )
    even = 0.5 * (values + reflected)
    return WaveProfile(grid.analysis_coarse @ even, grid)


def differentiate(grid: Grid, values: Field, order: int = 1) -> Field:
    """Spectral derivative of a grid field; exact for modes below n_modes."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be in {{1, 2, 3}}, got {order}")
    spec = np.fft.rfft(values)
    k = np.arange(spec.size)
    spec = spec * (1j * k) ** order
    if order % 2 == 1:
        spec[-1] = 0.0  # Nyquist mode has vanishing odd derivatives on the grid
    return np.fft.irfft(spec, n=grid.n_points)


def quadrature(grid: Grid, values: Field) -> float:
    """Trapezoid rule on the uniform periodic grid."""
    return grid.spacing * float(np.sum(values))


def inner(grid: Grid, f: Field, g: Field) -> float:
    """Standard L2 pairing <f, g> by quadrature."""
    return quadrature(grid, np.asarray(f) * np.asarray(g))


def norm_l2(grid: Grid, f: Field) -> float:
    return float(np.sqrt(max(inner(grid, f, f), 0.0)))


def h1_norm(grid: Grid, f: Field) -> float:
    """Sobolev norm sqrt(int f^2 + f'^2)."""
    fx = differentiate(grid, f, 1)
    return float(np.sqrt(max(inner(grid, f, f) + inner(grid, fx, fx), 0.0)))


def profile_values_fine(profile: WaveProfile, order: int = 0) -> Field:
    """Profile (or derivative) sampled on the dealiasing fine grid, exactly."""
    g = profile.grid
    a = profile.cos_coeffs
    k = g.wavenumbers.astype(float)
    if order == 0:
        return g.cos_fine @ a
    if order == 1:
        return g.sin_fine @ (-k * a)
    if order == 2:
        return g.cos_fine @ (-(k**2) * a)
    if order == 3:
        return g.sin_fine @ (k**3 * a)
    raise ValueError(f"unsupported order {order}")


def profile_derivative(profile: WaveProfile, order: int) -> Field:
    """Derivative of the profile on the coarse grid, exact from coefficients."""
    g = profile.grid
    a = profile.cos_coeffs
    k = g.wavenumbers.astype(float)
    if order == 1:
        return -np.sin(np.outer(g.nodes, k)) @ (k * a)
    if order == 2:
        return g.cos_coarse @ (-(k**2) * a)
    if order == 3:
        return np.sin(np.outer(g.nodes, k)) @ (k**3 * a)
    raise ValueError(f"unsupported order {order}")


def eval_profile(profile: WaveProfile, x, order: int = 0):
    """Trigonometric interpolation of the profile at arbitrary points."""
    a = profile.cos_coeffs
    k = profile.grid.wavenumbers.astype(float)
    x = np.asarray(x, dtype=float)
    phase = np.multiply.outer(x, k)
    if order == 0:
        return np.cos(phase) @ a
    if order == 1:
        return np.sin(phase) @ (-k * a)
    if order == 2:
        return np.cos(phase) @ (-(k**2) * a)
    if order == 3:
        return np.sin(phase) @ (k**3 * a)
    raise ValueError(f"unsupported order {order}")


def to_fine(grid: Grid, values: Field) -> Field:
    """Fourier interpolation of a coarse field onto the fine grid."""
    spec = np.fft.rfft(values)
    ratio = grid.n_fine / grid.n_points
    padded = np.zeros(grid.n_fine // 2 + 1, dtype=complex)
    padded[: spec.size] = spec
    padded[spec.size - 1] *= 0.5  # split the coarse Nyquist bin between +/-N
    return np.fft.irfft(padded * ratio, n=grid.n_fine)


def from_fine(grid: Grid, fine_values: Field) -> Field:
    """Band-limit a fine-grid field to modes <= n_modes and restrict to the coarse grid."""
    spec = np.fft.rfft(fine_values)
    ratio = grid.n_points / grid.n_fine
    m = grid.n_points // 2
    truncated = spec[: m + 1].copy()
    truncated[m] = 2.0 * truncated[m].real  # fold the +/-N pair onto the coarse Nyquist bin
    return np.fft.irfft(truncated * ratio, n=grid.n_points)


def dealiased_product(grid: Grid, f: Field, g: Field) -> Field:
    """Pointwise product with 3/2-rule zero padding, alias-free in modes <= n_modes."""
    return from_fine(grid, to_fine(grid, f) * to_fine(grid, g))


def spectral_tail_fraction(grid: Grid, values: Field) -> float:
    """Max magnitude in the top 10% of modes relative to the peak mode."""
    spec = np.abs(np.fft.rfft(values))
    peak = np.max(spec)
    if peak == 0.0:
        return 0.0
    cut = max(int(0.9 * (spec.size - 1)), 1)
    return float(np.max(spec[cut:]) / peak)

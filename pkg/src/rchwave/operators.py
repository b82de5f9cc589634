"""Dense symmetric operators linearized around a traveling wave.

Four operator kinds on the collocation space:

  L      second variation around the wave,
         -d/dx (c - phi) d/dx + (c - omega - 3 phi + phi''),
  L_Pi   the same quadratic form restricted to zero-mean fields,
  Hill   the Schroedinger form -d^2/dx^2 + Q obtained by removing the
         variable diffusion coefficient through a logarithmic phase,
  SMS    the congruent operator S Hill S with S = sqrt(c - phi).

Matrices are assembled as Galerkin forms in the orthonormal trigonometric
basis, with entries integrated on the dealiasing grid.  For L and L_Pi the
integrands are trigonometric polynomials below the aliasing limit, so the
entries are exact; pointwise collocation of the divergence-form term is
avoided because it misrepresents the top cosine mode and pollutes the
negative-eigenvalue count.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GapViolation, NearSingular, SolvabilityViolation
from .spectral import Grid, profile_values_fine, synthesize
from .waves import WavePoint

SOLVE_RTOL = 1e-8  # relative solvability / verification tolerance
COND_LIMIT = 1e12  # deflated-system condition number signalling a double kernel


@dataclass(frozen=True)
class OperatorMatrix:
    """Symmetric matrix in the orthonormal trig basis (or its zero-mean part)."""

    entries: np.ndarray
    kind: str  # "L" | "L_Pi" | "Hill" | "WeightedSymmetrized"
    basis: str  # "full" | "zero_mean"
    grid: Grid

    @property
    def basis_matrix(self) -> np.ndarray:
        table = self.grid.trig_grid
        return table[:, 1:] if self.basis == "zero_mean" else table

    def to_coeffs(self, field: np.ndarray) -> np.ndarray:
        full = self.grid.field_to_coeffs(field)
        return full[1:] if self.basis == "zero_mean" else full

    def to_field(self, coeffs: np.ndarray) -> np.ndarray:
        return self.basis_matrix @ coeffs

    def apply(self, field: np.ndarray) -> np.ndarray:
        """Operator action on a grid field (projected onto the basis span)."""
        return self.to_field(self.entries @ self.to_coeffs(field))


@dataclass(frozen=True)
class LiouvilleData:
    """Fields of the phase change that turns L into a Hill operator."""

    D: np.ndarray        # log-phase, ln((c - phi)/(c - phi(0)))
    Q: np.ndarray        # Hill potential on the coarse grid
    weight: np.ndarray   # (c - phi)^{-1}
    half_power: np.ndarray  # ((c - phi(0))/(c - phi))^{1/2}
    grid: Grid
    q_fine: np.ndarray
    gap_fine: np.ndarray


def _galerkin_form(grid: Grid, weight_fine: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Matrix of int weight * t_i * t_j using fine-grid quadrature."""
    wq = weight_fine * grid.fine_spacing
    m = table.T @ (wq[:, None] * table)
    return 0.5 * (m + m.T)


def _wave_fields_fine(w: WavePoint):
    phi = profile_values_fine(w.profile, 0)
    dphi = profile_values_fine(w.profile, 1)
    ddphi = profile_values_fine(w.profile, 2)
    gap = w.c - phi
    if np.min(gap) <= 0.0:
        raise GapViolation(f"c - phi reached {np.min(gap):.3e} <= 0", c=w.c)
    return phi, dphi, ddphi, gap


def assemble_L(w: WavePoint) -> OperatorMatrix:
    """Linearized operator around the wave on the full space."""
    grid = w.grid
    phi, _, ddphi, gap = _wave_fields_fine(w)
    pot = w.c - w.omega - 3.0 * phi + ddphi
    entries = _galerkin_form(grid, gap, grid.trig_fine_deriv) + _galerkin_form(
        grid, pot, grid.trig_fine
    )
    return OperatorMatrix(entries=entries, kind="L", basis="full", grid=grid)


def assemble_L_pi(w: WavePoint) -> OperatorMatrix:
    """Restriction of the linearized form to the zero-mean subspace.

    The nonlocal rank-one corrections of the projected operator add
    constant functions only, so dropping the constant basis vector from
    the full Galerkin matrix realizes them exactly.
    """
    full = assemble_L(w)
    return OperatorMatrix(
        entries=full.entries[1:, 1:], kind="L_Pi", basis="zero_mean", grid=w.grid
    )


def liouville(w: WavePoint) -> LiouvilleData:
    """Log-phase, Hill potential, weight, and half-power fields of the wave."""
    grid = w.grid
    phi_f, dphi_f, ddphi_f, gap_f = _wave_fields_fine(w)
    q_fine = (
        (w.c - w.omega - 3.0 * phi_f) / gap_f
        + ddphi_f / (2.0 * gap_f)
        - 0.25 * (dphi_f / gap_f) ** 2
    )
    phi = synthesize(w.profile)
    gap = w.c - phi
    if np.min(gap) <= 0.0:
        raise GapViolation(f"c - phi reached {np.min(gap):.3e} <= 0", c=w.c)
    gap0 = gap[0]  # first node is x = 0
    dphi = w.derivative(1)
    ddphi = w.derivative(2)
    q = (
        (w.c - w.omega - 3.0 * phi) / gap
        + ddphi / (2.0 * gap)
        - 0.25 * (dphi / gap) ** 2
    )
    return LiouvilleData(
        D=np.log(gap / gap0),
        Q=q,
        weight=1.0 / gap,
        half_power=np.sqrt(gap0 / gap),
        grid=grid,
        q_fine=q_fine,
        gap_fine=gap_f,
    )


def assemble_hill(ld: LiouvilleData) -> OperatorMatrix:
    """Schroedinger operator -d^2/dx^2 + Q in the trig basis."""
    grid = ld.grid
    stiffness = _galerkin_form(grid, np.ones(grid.n_fine), grid.trig_fine_deriv)
    entries = stiffness + _galerkin_form(grid, ld.q_fine, grid.trig_fine)
    return OperatorMatrix(entries=entries, kind="Hill", basis="full", grid=grid)


def assemble_weighted_symmetrized(w: WavePoint, hill: OperatorMatrix) -> OperatorMatrix:
    """Congruence S Hill S with the multiplication operator S = sqrt(c - phi)."""
    grid = w.grid
    gap_f = w.c - profile_values_fine(w.profile, 0)
    s_hat = _galerkin_form(grid, np.sqrt(gap_f), grid.trig_fine)
    entries = s_hat @ hill.entries @ s_hat
    entries = 0.5 * (entries + entries.T)
    return OperatorMatrix(
        entries=entries, kind="WeightedSymmetrized", basis="full", grid=grid
    )


def weight_form(w: WavePoint) -> np.ndarray:
    """Galerkin matrix of multiplication by (c - phi)^{-1} (positive definite)."""
    grid = w.grid
    gap_f = w.c - profile_values_fine(w.profile, 0)
    return _galerkin_form(grid, 1.0 / gap_f, grid.trig_fine)


def solve_on_complement(
    op: OperatorMatrix,
    rhs: np.ndarray,
    kernel: list,
    rtol: float = SOLVE_RTOL,
) -> np.ndarray:
    """Minimum-norm solution of op x = rhs orthogonal to the supplied kernel.

    Deflation via a bordered symmetric system; the right-hand side must be
    orthogonal to every kernel vector (Fredholm alternative).  Raises
    NearSingular when the bordered matrix is ill-conditioned, which is the
    signature of a fold (double kernel).
    """
    rhs_c = op.to_coeffs(np.asarray(rhs, dtype=float))
    rhs_norm = float(np.linalg.norm(rhs_c))
    if kernel:
        kmat = np.stack([op.to_coeffs(np.asarray(k, dtype=float)) for k in kernel], axis=1)
        kmat, _ = np.linalg.qr(kmat)
        overlap = kmat.T @ rhs_c
        if rhs_norm > 0.0 and np.max(np.abs(overlap)) > rtol * rhs_norm:
            raise SolvabilityViolation(
                f"rhs has kernel component {np.max(np.abs(overlap)):.3e} "
                f"(tolerance {rtol:.1e} * {rhs_norm:.3e})"
            )
        n, m = op.entries.shape[0], kmat.shape[1]
        bordered = np.zeros((n + m, n + m))
        bordered[:n, :n] = op.entries
        bordered[:n, n:] = kmat
        bordered[n:, :n] = kmat.T
        padded = np.concatenate([rhs_c, np.zeros(m)])
    else:
        bordered = op.entries
        padded = rhs_c
        n = op.entries.shape[0]
    moduli = np.abs(np.linalg.eigvalsh(bordered))  # symmetric: 2-norm condition is exact
    cond = float(np.max(moduli) / np.min(moduli)) if np.min(moduli) > 0.0 else np.inf
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NearSingular(f"deflated system condition number {cond:.3e} exceeds {COND_LIMIT:.1e}")
    sol = np.linalg.solve(bordered, padded)[:n]
    defect = float(np.linalg.norm(op.entries @ sol - rhs_c))
    if rhs_norm > 0.0 and defect > rtol * rhs_norm:
        raise SolvabilityViolation(
            f"deflated solve verification failed: |L x - rhs| = {defect:.3e}"
        )
    return op.to_field(sol)

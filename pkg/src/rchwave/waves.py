"""Traveling-wave family: small-amplitude seeds, Newton refinement, continuation.

A profile phi travels at speed c > omega/2 when it solves the integrated
wave equation

    -(c - phi) phi'' + (c - omega) phi - (3/2) phi^2 + (1/2) phi'^2 + A = 0,

where the zero-mean requirement pins the integration constant to

    A = (1/4pi) int phi'^2 + (3/4pi) int phi^2.

Unknowns are the cosine coefficients a_1..a_N, so evenness and zero mean
hold by representation and the Newton Jacobian is invertible along the
whole family.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, GapViolation, NoConvergence, StepUnderflow, TrivialCollapse
from .spectral import (
    Grid,
    WaveProfile,
    profile_derivative,
    profile_values_fine,
    synthesize,
)

NEWTON_TOL = 1e-12
MAX_ITER = 50
TRIVIAL_NORM = 1e-12
A_MAX_FACTOR = 0.1  # largest amplitude at which the raw two-mode seed is trusted
MAX_HALVINGS = 8
STEP_FLOOR = 1e-8
DELTA_C = 1e-4  # offset for the 4th-order derivative stencils in c


@lru_cache(maxsize=None)
def get_grid(n_modes: int = 64) -> Grid:
    """Shared grid instances so cached collocation tables are reused."""
    return Grid(n_modes)


def zero_mean_constant(profile: WaveProfile) -> float:
    """Integration constant A forced by the zero-mean property (exact Parseval)."""
    a = profile.cos_coeffs
    k2 = profile.grid.wavenumbers.astype(float) ** 2
    return float(np.sum(a * a * (k2 + 3.0)) / 4.0)


@dataclass(frozen=True)
class WavePoint:
    """A converged member of the family, with solver diagnostics."""

    profile: WaveProfile
    c: float
    omega: float
    A: float
    residual_norm: float
    min_gap: float
    iterations: int = 0

    def __post_init__(self):
        if self.c <= self.omega / 2.0:
            raise DomainError(f"wave speed c={self.c} must exceed omega/2={self.omega / 2.0}")
        if self.min_gap <= 0.0:
            raise GapViolation(f"c - phi reached {self.min_gap:.3e} <= 0", c=self.c)

    @property
    def grid(self) -> Grid:
        return self.profile.grid

    def values(self) -> np.ndarray:
        return synthesize(self.profile)

    def derivative(self, order: int) -> np.ndarray:
        return profile_derivative(self.profile, order)


@dataclass(frozen=True)
class FamilyCurve:
    """Converged points ordered by strictly increasing wave speed."""

    points: tuple
    omega: float
    step: float

    def __post_init__(self):
        cs = [p.c for p in self.points]
        if any(b <= a for a, b in zip(cs, cs[1:])):
            raise ValueError("family points must have strictly increasing c")

    @property
    def speeds(self) -> np.ndarray:
        return np.array([p.c for p in self.points])

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ConservedTriple:
    M: float
    E: float
    F: float


@dataclass(frozen=True)
class FamilyScalars:
    """Derivatives along the family at fixed omega."""

    dA_dc: float
    dE_dc: float
    dphi_dc: WaveProfile
    d_c: float


def stokes_amplitude(c: float, omega: float) -> float:
    """Amplitude parameter recovered from the wave speed near onset."""
    return float(np.sqrt(max(2.0 * omega * (c - omega / 2.0) / 3.0, 0.0)))


def stokes_seed(a: float, omega: float, grid: Grid | None = None) -> WavePoint:
    """Two-mode small-amplitude wave a*cos(x) + (a^2/omega)*cos(2x).

    Speed c = omega/2 + 3 a^2/(2 omega); the solvability balance at O(a^3)
    of the wave equation fixes this coefficient (the next profile term is
    (5/(4 omega^2)) a^3 cos(3x), left to Newton).  The stored A comes from
    the zero-mean constant of the seed profile, which matches a^2 to O(a^4).
    """
    if omega <= 0.0:
        raise DomainError(f"omega must be positive, got {omega}")
    if a <= 0.0:
        raise DomainError(f"amplitude must be positive (a = 0 is the bifurcation point), got {a}")
    if a > A_MAX_FACTOR * omega:
        raise DomainError(
            f"amplitude {a} outside trust region a <= {A_MAX_FACTOR * omega} for omega={omega}"
        )
    grid = grid or get_grid()
    coeffs = np.zeros(grid.n_modes)
    coeffs[0] = a
    if grid.n_modes >= 2:
        coeffs[1] = a * a / omega
    profile = WaveProfile(coeffs, grid)
    c = omega / 2.0 + 1.5 * a * a / omega
    res = residual(profile, c, omega)
    gap = c - synthesize(profile)
    return WavePoint(
        profile=profile,
        c=c,
        omega=omega,
        A=zero_mean_constant(profile),
        residual_norm=float(np.max(np.abs(res))),
        min_gap=float(np.min(gap)),
    )


def _quadratic_part_fine(profile: WaveProfile, c: float):
    """Fine-grid samples of -(c-phi)phi'' - (3/2)phi^2 + (1/2)phi'^2 plus the gap."""
    phi = profile_values_fine(profile, 0)
    dphi = profile_values_fine(profile, 1)
    ddphi = profile_values_fine(profile, 2)
    gap = c - phi
    quad = -gap * ddphi - 1.5 * phi * phi + 0.5 * dphi * dphi
    return phi, dphi, ddphi, gap, quad


def residual(profile: WaveProfile, c: float, omega: float) -> np.ndarray:
    """Wave-equation residual on the coarse grid, products dealiased.

    Zero mean is a structural identity of the zero-mean formulation: the
    mean of the quadratic terms cancels A exactly, so the returned field
    has mean at round-off for any even zero-mean profile.
    """
    grid = profile.grid
    _, _, _, gap, quad = _quadratic_part_fine(profile, c)
    if np.min(gap) <= 0.0:
        raise GapViolation(f"c - phi reached {np.min(gap):.3e} <= 0", c=c)
    a_const = zero_mean_constant(profile)
    modes = grid.analysis_fine @ quad + (c - omega) * profile.cos_coeffs
    mean = float(np.mean(quad)) + a_const
    return grid.cos_coarse @ modes + mean


def _jacobian(profile: WaveProfile, c: float, omega: float) -> np.ndarray:
    """Exact Jacobian of the dealiased residual w.r.t. the cosine coefficients."""
    grid = profile.grid
    phi, dphi, ddphi, gap, _ = _quadratic_part_fine(profile, c)
    k = grid.wavenumbers.astype(float)
    jac_fine = (
        (ddphi - 3.0 * phi)[:, None] * grid.cos_fine
        + gap[:, None] * (grid.cos_fine * (k * k)[None, :])
        - dphi[:, None] * (grid.sin_fine * k[None, :])
    )
    return grid.analysis_fine @ jac_fine + (c - omega) * np.eye(grid.n_modes)


def newton_refine(
    seed: WaveProfile,
    c: float,
    omega: float,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
) -> WavePoint:
    """Newton iteration on the cosine coefficients down to sup-norm tol."""
    if omega <= 0.0:
        raise DomainError(f"omega must be positive, got {omega}")
    if c <= omega / 2.0:
        raise DomainError(f"c={c} is outside the open interval (omega/2, inf)")
    grid = seed.grid
    coeffs = seed.cos_coeffs.copy()
    for iteration in range(max_iter + 1):
        profile = WaveProfile(coeffs, grid)
        res = residual(profile, c, omega)
        res_norm = float(np.max(np.abs(res)))
        if res_norm <= tol:
            if np.max(np.abs(coeffs)) < TRIVIAL_NORM:
                raise TrivialCollapse(f"iterate collapsed to the zero solution at c={c}")
            # normalize to the crest-at-origin representative: the half-period
            # translate (a_k -> (-1)^k a_k) is the same wave with phi''(0) > 0
            if float(np.sum(coeffs * grid.wavenumbers**2)) < 0.0:
                coeffs = coeffs * (-1.0) ** grid.wavenumbers
                profile = WaveProfile(coeffs, grid)
                res_norm = float(np.max(np.abs(residual(profile, c, omega))))
            gap = c - synthesize(profile)
            return WavePoint(
                profile=profile,
                c=c,
                omega=omega,
                A=zero_mean_constant(profile),
                residual_norm=res_norm,
                min_gap=float(np.min(gap)),
                iterations=iteration,
            )
        if iteration == max_iter:
            break
        jac = _jacobian(profile, c, omega)
        modes = grid.analysis_fine @ _quadratic_part_fine(profile, c)[4] + (c - omega) * coeffs
        coeffs = coeffs - np.linalg.solve(jac, modes)
        if np.max(np.abs(coeffs)) < TRIVIAL_NORM:
            raise TrivialCollapse(f"iterate collapsed to the zero solution at c={c}")
    raise NoConvergence(
        f"no convergence after {max_iter} iterations at c={c} (residual {res_norm:.3e})",
        c=c,
        residual=res_norm,
    )


def _march(
    omega: float,
    targets: list,
    record_from: float,
    grid: Grid,
    tol: float,
) -> list:
    """Solve a strictly increasing list of speeds, seeding each from the last.

    The first point is seeded from the two-mode expansion; later points
    extrapolate linearly from the two previous converged coefficient
    vectors.  Failures trigger step halving (at most MAX_HALVINGS times
    per target, never below STEP_FLOOR).
    """
    recorded = []
    prev = None  # (c, coeffs)
    prev2 = None
    pending = list(targets)
    halvings = 0
    while pending:
        c_t = pending[0]
        if prev is None:
            a0 = min(stokes_amplitude(c_t, omega), A_MAX_FACTOR * omega)
            seed_coeffs = stokes_seed(a0, omega, grid).profile.cos_coeffs
        elif prev2 is None:
            seed_coeffs = prev[1]
        else:
            slope = (prev[1] - prev2[1]) / (prev[0] - prev2[0])
            seed_coeffs = prev[1] + slope * (c_t - prev[0])
        try:
            point = newton_refine(WaveProfile(seed_coeffs, grid), c_t, omega, tol)
        except (NoConvergence, GapViolation, TrivialCollapse) as exc:
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise
            c_base = prev[0] if prev is not None else omega / 2.0
            mid = 0.5 * (c_base + c_t)
            if c_t - mid < STEP_FLOOR or mid <= omega / 2.0:
                raise StepUnderflow(f"step underflow while approaching c={c_t}") from exc
            pending.insert(0, mid)
            continue
        halvings = 0
        pending.pop(0)
        prev2 = prev
        prev = (c_t, point.profile.cos_coeffs)
        if c_t >= record_from - 1e-12:
            recorded.append(point)
    return recorded


def continue_family(
    omega: float,
    c_start: float,
    c_end: float,
    step: float,
    grid: Grid | None = None,
    tol: float = NEWTON_TOL,
) -> FamilyCurve:
    """Continue the family over [c_start, c_end] with c-spacing <= step."""
    if omega <= 0.0:
        raise DomainError(f"omega must be positive, got {omega}")
    if not (omega / 2.0 < c_start <= c_end):
        raise DomainError(
            f"need omega/2 < c_start <= c_end, got omega/2={omega / 2.0}, "
            f"c_start={c_start}, c_end={c_end}"
        )
    if step <= 0.0:
        raise DomainError(f"step must be positive, got {step}")
    grid = grid or get_grid()

    # walk up from the trust region of the two-mode seed when c_start is far from onset
    c_trust = omega / 2.0 + 1.5 * (A_MAX_FACTOR * omega) ** 2 / omega
    targets = []
    if c_start > c_trust:
        n_ramp = int(np.ceil((c_start - c_trust) / step))
        targets.extend(np.linspace(c_trust, c_start, n_ramp + 1)[:-1])
    if c_end > c_start:
        n = int(np.ceil((c_end - c_start) / step))
        targets.extend(np.linspace(c_start, c_end, n + 1))
    else:
        targets.append(c_start)
    points = _march(omega, targets, c_start, grid, tol)
    return FamilyCurve(points=tuple(points), omega=omega, step=step)


def solve_at(c: float, omega: float, grid: Grid | None = None, tol: float = NEWTON_TOL) -> WavePoint:
    """Converge the family member at a single speed, continuing from onset."""
    curve = continue_family(omega, c, c, step=0.05 * max(1.0, omega), grid=grid, tol=tol)
    return curve.points[-1]


def conserved(profile: WaveProfile, omega: float) -> ConservedTriple:
    """Mass, momentum, and energy of the wave, by fine-grid quadrature.

    The fine grid has more than 3*n_modes points, so the cubic integrands
    are integrated exactly.  The mass vanishes identically because no
    constant mode is stored.
    """
    grid = profile.grid
    phi = profile_values_fine(profile, 0)
    dphi = profile_values_fine(profile, 1)
    w = 2.0 * np.pi / grid.n_fine
    e_val = 0.5 * w * float(np.sum(dphi * dphi + phi * phi))
    f_val = 0.5 * w * float(np.sum(phi**3 + phi * dphi * dphi + omega * phi * phi))
    return ConservedTriple(M=0.0, E=e_val, F=f_val)


def _scalars_from_dcoeffs(w: WavePoint, dcoeffs: np.ndarray) -> FamilyScalars:
    a = w.profile.cos_coeffs
    k2 = w.grid.wavenumbers.astype(float) ** 2
    dA_dc = float(np.sum(a * (k2 + 3.0) * dcoeffs) / 2.0)
    dE_dc = float(np.pi * np.sum((1.0 + k2) * a * dcoeffs))
    d_c = w.omega * (w.c - w.omega) + (w.omega + 2.0 * w.c) * dA_dc - 4.0 * w.A
    return FamilyScalars(
        dA_dc=dA_dc,
        dE_dc=dE_dc,
        dphi_dc=WaveProfile(dcoeffs, w.grid),
        d_c=float(d_c),
    )


def point_scalars(w: WavePoint, delta: float = DELTA_C, method: str = "implicit") -> FamilyScalars:
    """dA/dc, dE/dc, dphi/dc, and d_c = omega(c-omega) + (omega+2c) dA/dc - 4A.

    The default differentiates the discrete system implicitly,
    da/dc = -J^{-1} dR/dc, which is exact at the solver tolerance; the
    family behaves like sqrt(c - omega/2) near onset, where difference
    stencils in c lose four digits.  method="fd" keeps the 4th-order
    centered re-solve stencil as an independent cross-check.
    """
    if method == "implicit":
        grid = w.grid
        jac = _jacobian(w.profile, w.c, w.omega)
        ddphi_fine = profile_values_fine(w.profile, 2)
        dres_dc = grid.analysis_fine @ (-ddphi_fine) + w.profile.cos_coeffs
        dcoeffs = -np.linalg.solve(jac, dres_dc)
        return _scalars_from_dcoeffs(w, dcoeffs)
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")

    if w.c - 2.0 * delta > w.omega / 2.0:
        weights = {-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}
        self_weight = 0.0
    else:
        weights = {1: 48.0, 2: -36.0, 3: 16.0, 4: -3.0}
        self_weight = -25.0
    solved = {
        off: newton_refine(w.profile, w.c + off * delta, w.omega) for off in weights
    }

    def deriv(value_of):
        total = self_weight * value_of(w)
        for off, wt in weights.items():
            total = total + wt * value_of(solved[off])
        return total / (12.0 * delta)

    dcoeffs = deriv(lambda p: p.profile.cos_coeffs)
    scalars = _scalars_from_dcoeffs(w, dcoeffs)
    # recompute the two functionals from their own stencils (independent of dphi/dc)
    dA_dc = float(deriv(lambda p: p.A))
    dE_dc = float(deriv(lambda p: conserved(p.profile, p.omega).E))
    d_c = w.omega * (w.c - w.omega) + (w.omega + 2.0 * w.c) * dA_dc - 4.0 * w.A
    return FamilyScalars(dA_dc=dA_dc, dE_dc=dE_dc, dphi_dc=scalars.dphi_dc, d_c=float(d_c))


def family_scalars(curve: FamilyCurve, i: int, delta: float = DELTA_C) -> FamilyScalars:
    """Scalars of the i-th curve point."""
    return point_scalars(curve.points[i], delta)

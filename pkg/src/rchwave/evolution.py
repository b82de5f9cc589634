"""Time integration of the evolution equation in Hamiltonian form.

The flow is u_t = J F'(u) with the smoothing skew operator
J = -(1 - d^2/dx^2)^{-1} d/dx (Fourier symbol -ik/(1+k^2)) and

    F'(u) = (3/2) u^2 - u u_xx - (1/2) u_x^2 + omega u.

Traveling waves ride exactly: F'(phi) collapses to c (phi - phi'') + A by
the wave equation, so the semidiscrete right side of phi(x - ct) is
-c phi'.  Products are dealiased on the fine grid; time stepping is
classical fixed-step RK4, which keeps the quadratic invariants to
integrator accuracy over long runs.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AliasingWarning, BlowupDetected, DomainError
from .spectral import (
    Grid,
    WaveProfile,
    differentiate,
    eval_profile,
    quadrature,
    spectral_tail_fraction,
    to_fine,
)
from .waves import ConservedTriple, WavePoint

BLOWUP_SUP = 1e6
TAIL_WARN = 1e-6


@dataclass(frozen=True)
class EvolutionState:
    u: np.ndarray
    t: float
    conserved0: ConservedTriple


@dataclass(frozen=True)
class EvolutionSample:
    t: float
    distance: float
    M: float
    E: float
    F: float


def conserved_field(grid: Grid, u: np.ndarray, omega: float) -> ConservedTriple:
    """Mass, momentum, energy of a general grid field (cubic terms on the fine grid)."""
    uf = to_fine(grid, u)
    uxf = to_fine(grid, differentiate(grid, u, 1))
    wf = 2.0 * np.pi / grid.n_fine
    m_val = quadrature(grid, u)
    e_val = 0.5 * wf * float(np.sum(uxf * uxf + uf * uf))
    f_val = 0.5 * wf * float(np.sum(uf**3 + uf * uxf * uxf + omega * uf * uf))
    return ConservedTriple(M=m_val, E=e_val, F=f_val)


def initial_state(grid: Grid, u: np.ndarray, omega: float) -> EvolutionState:
    return EvolutionState(u=np.asarray(u, dtype=float), t=0.0, conserved0=conserved_field(grid, u, omega))


def _padded_spectra(grid: Grid, u: np.ndarray):
    """Fine-grid samples of u, u_x, u_xx from one transform."""
    spec = np.fft.rfft(u)
    spec[-1] *= 0.5  # split the coarse Nyquist bin
    nf = grid.n_fine
    ratio = nf / grid.n_points
    padded = np.zeros(nf // 2 + 1, dtype=complex)
    padded[: spec.size] = spec * ratio
    k = np.arange(nf // 2 + 1, dtype=float)
    uf = np.fft.irfft(padded, n=nf)
    uxf = np.fft.irfft(padded * (1j * k), n=nf)
    uxxf = np.fft.irfft(padded * -(k * k), n=nf)
    return uf, uxf, uxxf


def rhs(grid: Grid, u: np.ndarray, omega: float, warn_aliasing: bool = True) -> np.ndarray:
    """Right side J F'(u) with dealiased quadratic products."""
    if warn_aliasing and spectral_tail_fraction(grid, u) > TAIL_WARN:
        warnings.warn(
            f"spectral tail above {TAIL_WARN:.0e} of peak; increase n_modes",
            AliasingWarning,
            stacklevel=2,
        )
    uf, uxf, uxxf = _padded_spectra(grid, u)
    nl_fine = 1.5 * uf * uf - uf * uxxf - 0.5 * uxf * uxf
    spec_nl = np.fft.rfft(nl_fine)
    m = grid.n_points // 2
    trunc = spec_nl[: m + 1] * (grid.n_points / grid.n_fine)
    trunc[m] = 2.0 * trunc[m].real
    spec_total = trunc + np.fft.rfft(omega * u)
    k = np.arange(m + 1, dtype=float)
    out = spec_total * (-1j * k / (1.0 + k * k))
    out[m] = 0.0  # odd symbol has no grid representation at the top mode
    return np.fft.irfft(out, n=grid.n_points)


def dt_max(grid: Grid, u: np.ndarray, omega: float) -> float:
    """Advective step bound; J gains a derivative, so the limit is first order in k."""
    n = grid.n_modes
    return 0.5 / (float(np.max(np.abs(u))) * n + omega * n / (1.0 + n * n))


def step(state: EvolutionState, dt: float, omega: float, grid: Grid) -> EvolutionState:
    """One classical RK4 step."""
    u = state.u
    if abs(dt) > dt_max(grid, u, omega):
        raise DomainError(f"dt={dt} exceeds the stable step bound {dt_max(grid, u, omega):.3e}")
    k1 = rhs(grid, u, omega)
    k2 = rhs(grid, u + 0.5 * dt * k1, omega, warn_aliasing=False)
    k3 = rhs(grid, u + 0.5 * dt * k2, omega, warn_aliasing=False)
    k4 = rhs(grid, u + dt * k3, omega, warn_aliasing=False)
    u_new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if np.max(np.abs(u_new)) > BLOWUP_SUP:
        raise BlowupDetected(f"sup-norm exceeded {BLOWUP_SUP:.0e} at t={state.t + dt}")
    return EvolutionState(u=u_new, t=state.t + dt, conserved0=state.conserved0)


def linearized_rhs(grid: Grid, v: np.ndarray, w: WavePoint) -> np.ndarray:
    """Right side -J L v of the flow linearized around the frozen wave."""
    from .spectral import dealiased_product

    phi = w.values()
    ddphi = w.derivative(2)
    vx = differentiate(grid, v, 1)
    vxx = differentiate(grid, v, 2)
    lv = (
        -w.c * vxx
        + differentiate(grid, dealiased_product(grid, phi, vx), 1)
        + (w.c - w.omega) * v
        + dealiased_product(grid, ddphi - 3.0 * phi, v)
    )
    spec = np.fft.rfft(lv)
    k = np.arange(spec.size, dtype=float)
    out = spec * (1j * k / (1.0 + k * k))  # -J applied to L v
    out[-1] = 0.0
    return np.fft.irfft(out, n=grid.n_points)


def shifted_wave_field(profile: WaveProfile, shift: float) -> np.ndarray:
    """Grid samples of phi(x - shift) by trigonometric interpolation."""
    return eval_profile(profile, profile.grid.nodes - shift)


def h1_products(grid: Grid, u: np.ndarray):
    """Two-sided Fourier data used by the orbital distance."""
    m = grid.n_points
    spec = np.fft.rfft(u) / m
    spec[-1] *= 0.5
    return spec  # c_k for k = 0..N (two-sided convention at the top mode)


def orbital_distance(grid: Grid, u: np.ndarray, profile: WaveProfile) -> float:
    """inf over shifts l of the H1 distance between u and phi(. + l).

    The cross-correlation is scanned on a 4x oversampled shift grid in
    Fourier space, then the squared distance (a sum of non-negative
    per-mode terms, so free of cancellation) is minimized by golden
    section around the best candidate.
    """
    cu = h1_products(grid, u)
    n = grid.n_modes
    k = np.arange(n + 1, dtype=float)
    cp = np.zeros(n + 1, dtype=complex)
    cp[1:] = 0.5 * profile.cos_coeffs
    mult = np.full(n + 1, 2.0)
    mult[0] = 1.0
    weight = mult * (1.0 + k * k) * 2.0 * np.pi

    def dist2(shift: float) -> float:
        diff = cu - cp * np.exp(1j * k * shift)
        return float(np.sum(weight * (diff.real**2 + diff.imag**2)))

    n_scan = 4 * grid.n_points
    ls = 2.0 * np.pi * np.arange(n_scan) / n_scan
    corr = (np.exp(-1j * np.outer(ls, k)) * (weight * np.conj(cp) * cu)[None, :]).sum(axis=1).real
    best = int(np.argmax(corr))
    lo = ls[best] - 2.0 * np.pi / n_scan
    hi = ls[best] + 2.0 * np.pi / n_scan
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = dist2(x1), dist2(x2)
    for _ in range(80):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = dist2(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = dist2(x2)
    return float(np.sqrt(max(min(f1, f2), 0.0)))


def default_perturbation(grid: Grid) -> np.ndarray:
    """Smooth mixed-parity shape used when no perturbation is supplied."""
    return np.cos(3.0 * grid.nodes) + np.sin(2.0 * grid.nodes)


def random_perturbation(grid: Grid, seed: int) -> np.ndarray:
    """Low-mode random shape with a logged seed (modes 1..6, both parities)."""
    rng = np.random.default_rng(seed)
    out = np.zeros(grid.n_points)
    for k in range(1, 7):
        amp_c, amp_s = rng.standard_normal(2)
        out += amp_c * np.cos(k * grid.nodes) + amp_s * np.sin(k * grid.nodes)
    return out


def run_orbital_experiment(
    w: WavePoint,
    perturbation_size: float,
    T: float,
    dt: float = 1e-3,
    dt_out: float = 0.5,
    perturbation: np.ndarray | None = None,
) -> list:
    """Evolve phi + perturbation to time T, sampling the orbit distance.

    The perturbation is rescaled so its H1 norm is perturbation_size
    times that of the wave; samples carry the conserved triple so drift
    is visible alongside the distance.
    """
    from .spectral import h1_norm, synthesize

    grid = w.grid
    phi = synthesize(w.profile)
    if perturbation_size > 0.0:
        shape = default_perturbation(grid) if perturbation is None else np.asarray(perturbation, dtype=float)
        shape_norm = h1_norm(grid, shape)
        if shape_norm == 0.0:
            raise DomainError("perturbation shape has zero H1 norm")
        u0 = phi + shape * (perturbation_size * h1_norm(grid, phi) / shape_norm)
    else:
        u0 = phi.copy()

    state = initial_state(grid, u0, w.omega)
    samples = [
        EvolutionSample(
            t=0.0,
            distance=orbital_distance(grid, u0, w.profile),
            M=state.conserved0.M,
            E=state.conserved0.E,
            F=state.conserved0.F,
        )
    ]
    n_steps = max(int(round(T / dt)), 1)
    dt_eff = T / n_steps
    sample_every = max(int(round(dt_out / dt_eff)), 1)
    for i in range(1, n_steps + 1):
        state = step(state, dt_eff, w.omega, grid)
        if i % sample_every == 0 or i == n_steps:
            cons = conserved_field(grid, state.u, w.omega)
            samples.append(
                EvolutionSample(
                    t=state.t,
                    distance=orbital_distance(grid, state.u, w.profile),
                    M=cons.M,
                    E=cons.E,
                    F=cons.F,
                )
            )
    return samples

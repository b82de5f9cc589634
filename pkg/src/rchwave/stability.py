"""Eigenvalue counting and the spectral-stability verdict.

The decision machinery: count negative and zero eigenvalues of the
linearized operator and its zero-mean restriction, correct the counts for
the constraint directions {1, phi - phi''} through the 2x2 matrix of
resolvent inner products, and certify spectral (hence orbital) stability
when either

  * dE/dc > 0  (valid whatever d_c is), or
  * d_c != 0, dA/dc > 0, and the constrained negative count is zero.

No instability is ever reported: failure of a sufficient condition proves
nothing, so the fallback verdict is "inconclusive".
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NearSingular, NegativeCount
from .floquet import FloquetReport, extract_theta, fundamental_solutions
from .operators import (
    OperatorMatrix,
    assemble_hill,
    assemble_L,
    assemble_L_pi,
    assemble_weighted_symmetrized,
    liouville,
    solve_on_complement,
    weight_form,
)
from .spectral import inner
from .waves import (
    ConservedTriple,
    FamilyScalars,
    WavePoint,
    conserved,
    point_scalars,
)

TOL_ZERO = 1e-7   # eigenvalue zero threshold, scaled by the spectral radius
TOL_SIGN = 1e-8   # zero test for the sign-decision scalars
INDEX_ZERO_TOL = 1e-8  # zero threshold for the 2x2 index matrix


def fold_tolerance(w: WavePoint) -> float:
    """Scale-aware threshold below which d_c is treated as a fold."""
    return 1e-6 * (1.0 + abs(w.omega * (w.c - w.omega)))


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    n_neg: int
    n_zero: int
    kernel_vectors: list
    operator_kind: str


def spectrum(op: OperatorMatrix, tol_zero: float = TOL_ZERO) -> SpectrumReport:
    """Dense symmetric eigensolve with scale-aware zero detection."""
    evals, evecs = scipy.linalg.eigh(op.entries)
    thresh = tol_zero * max(1.0, float(np.max(np.abs(evals))))
    zero_mask = np.abs(evals) <= thresh
    kernel = [op.to_field(evecs[:, i]) for i in np.nonzero(zero_mask)[0]]
    return SpectrumReport(
        eigenvalues=evals,
        n_neg=int(np.sum(evals < -thresh)),
        n_zero=int(np.sum(zero_mask)),
        kernel_vectors=kernel,
        operator_kind=op.kind,
    )


def generalized_hill_spectrum(w: WavePoint, hill: OperatorMatrix, tol_zero: float = TOL_ZERO):
    """Direct generalized eigensolve Hill w = lambda (c - phi)^{-1} w.

    Returns (eigenvalues, n_neg, n_zero, zero_position); the position of
    the zero eigenvalue (0-based) independently checks the Floquet
    classification: second eigenvalue for theta > 0, third for theta < 0.
    """
    evals = scipy.linalg.eigh(hill.entries, weight_form(w), eigvals_only=True)
    thresh = tol_zero * max(1.0, float(np.max(np.abs(evals))))
    n_neg = int(np.sum(evals < -thresh))
    n_zero = int(np.sum(np.abs(evals) <= thresh))
    return evals, n_neg, n_zero, n_neg


@dataclass(frozen=True)
class IndexMatrix:
    """Constraint-space corrections from resolvent inner products."""

    entries: np.ndarray  # 2x2: constraints (phi - phi'', 1)
    det: float
    n0: int
    z0: int
    z_inf: int
    sol_qmix: np.ndarray  # L^{-1}(phi - phi'')
    sol_one: np.ndarray   # L^{-1} 1


def index_matrix(w: WavePoint, L: OperatorMatrix, kernel: list) -> IndexMatrix:
    """2x2 matrix of <L^{-1} v_i, v_j> for v = (phi - phi'', 1).

    Requires a simple kernel spanned by phi'; at a fold the deflated solve
    raises NearSingular and the caller falls back to the energy criterion.
    """
    grid = w.grid
    rhs1 = w.values() - w.derivative(2)
    rhs2 = np.ones(grid.n_points)
    s1 = solve_on_complement(L, rhs1, kernel)
    s2 = solve_on_complement(L, rhs2, kernel)
    a11 = inner(grid, s1, rhs1)
    a12 = 0.5 * (inner(grid, s1, rhs2) + inner(grid, s2, rhs1))
    a22 = inner(grid, s2, rhs2)
    entries = np.array([[a11, a12], [a12, a22]])
    evals = np.linalg.eigvalsh(entries)
    thresh = INDEX_ZERO_TOL * max(1.0, float(np.max(np.abs(entries))))
    return IndexMatrix(
        entries=entries,
        det=float(np.linalg.det(entries)),
        n0=int(np.sum(evals < -thresh)),
        z0=int(np.sum(np.abs(evals) <= thresh)),
        z_inf=0,
        sol_qmix=s1,
        sol_one=s2,
    )


def constrained_count(n_L: int, z_L: int, idx: IndexMatrix) -> int:
    """Negative count of L restricted to {1, phi - phi''}^perp."""
    count = n_L - idx.n0 - idx.z0
    if count < 0:
        raise NegativeCount(
            f"constrained count {count} < 0 (n={n_L}, n0={idx.n0}, z0={idx.z0}); "
            "upstream eigenvalue counts are inconsistent"
        )
    return count


def zero_mean_count_prediction(n_L: int, inner_one: float, scale: float = 1.0) -> int:
    """Predicted negative count on the zero-mean space from the single
    constraint v = 1: n0 = 1 if <L^{-1}1, 1> < 0, z0 = 1 if it vanishes."""
    thresh = TOL_SIGN * max(1.0, abs(scale))
    if inner_one < -thresh:
        n0, z0 = 1, 0
    elif abs(inner_one) <= thresh:
        n0, z0 = 0, 1
    else:
        n0, z0 = 0, 0
    count = n_L - n0 - z0
    if count < 0:
        raise NegativeCount(f"predicted zero-mean count {count} < 0")
    return count


@dataclass(frozen=True)
class StabilityVerdict:
    c: float
    omega: float
    n_L: int
    z_L: int
    n_LPi: int
    z_LPi: int
    theta: float
    d_c: float
    dA_dc: float
    dE_dc: float
    det_A0: float          # nan at a fold
    inner_L_inv_1_1: float  # nan at a fold
    constrained_neg: int | None
    decision: str   # "spectrally_stable" | "inconclusive" | "flagged_fold"
    criterion: str  # "dE_positive" | "dc_dA" | "none"
    fold_flag: bool
    slope_route_holds: bool  # d_c != 0, dA/dc > 0, constrained count 0


def verdict(
    w: WavePoint,
    scalars: FamilyScalars,
    spec_L: SpectrumReport,
    spec_LPi: SpectrumReport,
    floq: FloquetReport,
    idx: IndexMatrix | None,
) -> StabilityVerdict:
    """Combine all reports into the stability decision for one wave."""
    fold = abs(scalars.d_c) <= fold_tolerance(w)
    if idx is not None:
        count = constrained_count(spec_L.n_neg, spec_L.n_zero, idx)
        det_a0 = idx.det
        inner_one = float(idx.entries[1, 1])
    else:
        count = None
        det_a0 = float("nan")
        inner_one = float("nan")

    energy_route = scalars.dE_dc > TOL_SIGN
    slope_route = (
        (not fold)
        and scalars.dA_dc > TOL_SIGN
        and count is not None
        and count == 0
    )
    if energy_route:
        decision, criterion = "spectrally_stable", "dE_positive"
    elif slope_route:
        decision, criterion = "spectrally_stable", "dc_dA"
    elif fold:
        decision, criterion = "flagged_fold", "none"
    else:
        decision, criterion = "inconclusive", "none"
    return StabilityVerdict(
        c=w.c,
        omega=w.omega,
        n_L=spec_L.n_neg,
        z_L=spec_L.n_zero,
        n_LPi=spec_LPi.n_neg,
        z_LPi=spec_LPi.n_zero,
        theta=floq.theta,
        d_c=scalars.d_c,
        dA_dc=scalars.dA_dc,
        dE_dc=scalars.dE_dc,
        det_A0=det_a0,
        inner_L_inv_1_1=inner_one,
        constrained_neg=count,
        decision=decision,
        criterion=criterion,
        fold_flag=fold,
        slope_route_holds=bool(slope_route),
    )


@dataclass(frozen=True)
class PointAnalysis:
    """Everything the pipeline computes for one wave."""

    point: WavePoint
    scalars: FamilyScalars
    cons: ConservedTriple
    spec_L: SpectrumReport
    spec_LPi: SpectrumReport
    spec_SMS: SpectrumReport
    floquet: FloquetReport
    idx: IndexMatrix | None
    vk_value: float          # <L_Pi^{-1}(phi - phi''), phi - phi''>
    gen_zero_position: int   # position of 0 in the weighted Hill eigensolve
    verdict: StabilityVerdict


def analyze_point(w: WavePoint, theta_scale: float | None = None) -> PointAnalysis:
    """Run the full per-point pipeline: scalars, spectra, Floquet, indices."""
    scalars = point_scalars(w)
    cons = conserved(w.profile, w.omega)

    L = assemble_L(w)
    LPi = assemble_L_pi(w)
    spec_L = spectrum(L)
    spec_LPi = spectrum(LPi)

    ld = liouville(w)
    hill = assemble_hill(ld)
    sms = assemble_weighted_symmetrized(w, hill)
    spec_sms = spectrum(sms)
    _, _, _, zero_pos = generalized_hill_spectrum(w, hill)

    y1, _ = fundamental_solutions(w)
    floq = extract_theta(w, y1, theta_scale)

    dphi = w.derivative(1)
    try:
        idx = index_matrix(w, L, [dphi])
    except NearSingular:
        idx = None  # fold: the verdict runs on the energy route alone

    rhs = w.values() - w.derivative(2)
    vk_sol = solve_on_complement(LPi, rhs, [dphi])
    vk_value = inner(w.grid, vk_sol, rhs)

    v = verdict(w, scalars, spec_L, spec_LPi, floq, idx)
    return PointAnalysis(
        point=w,
        scalars=scalars,
        cons=cons,
        spec_L=spec_L,
        spec_LPi=spec_LPi,
        spec_SMS=spec_sms,
        floquet=floq,
        idx=idx,
        vk_value=float(vk_value),
        gen_zero_position=zero_pos,
        verdict=v,
    )

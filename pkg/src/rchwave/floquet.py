"""Fundamental solutions of the linearized equation and the Floquet constant.

The kernel equation L y = 0 is integrated as an initial-value problem

    y'' = [phi' y' + (c - omega - 3 phi + phi'') y] / (c - phi),

whose fundamental pair is the odd periodic solution y2 = phi' and the even
solution y1 normalized by y1(0) = 1/phi''(0), y1'(0) = 0, so the Wronskian
W(y1, y2)(0) = 1.  Carrying the half-power weight of the Hill reduction,
the pair satisfies the affine monodromy

    w1(x + 2*pi) = w1(x) + theta * w2(x),

and theta both classifies the zero eigenvalue (simple/double, second/third)
and enters the integral identities for the deflated solves.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, InconsistentTheta, IntegrationFailure
from .spectral import eval_profile
from .waves import WavePoint

IVP_RTOL = 1e-11
IVP_ATOL = 1e-13
THETA_ZERO_TOL = 1e-6  # |theta| below this scale flags a double kernel
THETA_FIT_TOL = 1e-5   # agreement between the derivative and monodromy routes
N_SAMPLES = 1024       # trajectory samples per period


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the kernel equation over [0, 4*pi]."""

    x: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    int_y: np.ndarray  # running integral of y from 0

    def segment(self, upto: float):
        mask = self.x <= upto + 1e-12
        return self.x[mask], self.y[mask], self.yp[mask]


@dataclass(frozen=True)
class FloquetReport:
    theta: float
    theta_fit: float
    y1_deriv_2pi: float
    phi2pp0: float          # phi''(0)
    wronskian_drift: float
    int_y1: float           # integral of y1 over one period (measured, not assumed zero)
    classification: str     # "simple_second" | "double" | "simple_third"


def classify_theta(theta: float, theta_scale: float | None = None) -> str:
    scale = abs(theta) if theta_scale is None else abs(theta_scale)
    if abs(theta) < THETA_ZERO_TOL * (1.0 + scale):
        return "double"
    return "simple_second" if theta > 0.0 else "simple_third"


def fundamental_solutions(
    w: WavePoint,
    rtol: float = IVP_RTOL,
    atol: float = IVP_ATOL,
    n_samples: int = N_SAMPLES,
):
    """Integrate y1 over two periods; y2 = phi' is attached analytically."""
    p = w.profile
    c, omega = w.c, w.omega
    phipp0 = float(eval_profile(p, 0.0, 2))
    coeff_scale = float(np.max(np.abs(p.cos_coeffs)))
    if abs(phipp0) < 1e-10 * max(1.0, coeff_scale):
        raise DomainError("phi''(0) vanishes; the trivial wave has no Floquet normalization")

    def rhs(x, state):
        ph = float(eval_profile(p, x, 0))
        d1 = float(eval_profile(p, x, 1))
        d2 = float(eval_profile(p, x, 2))
        y, yp, _ = state
        return (yp, (d1 * yp + (c - omega - 3.0 * ph + d2) * y) / (c - ph), y)

    xs = np.linspace(0.0, 4.0 * np.pi, 2 * n_samples + 1)
    sol = solve_ivp(
        rhs,
        (0.0, 4.0 * np.pi),
        (1.0 / phipp0, 0.0, 0.0),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        t_eval=xs,
    )
    if not sol.success:
        raise IntegrationFailure(f"kernel-equation integration failed: {sol.message}")
    y1 = Trajectory(x=xs, y=sol.y[0], yp=sol.y[1], int_y=sol.y[2])
    y2 = Trajectory(
        x=xs,
        y=eval_profile(p, xs, 1),
        yp=eval_profile(p, xs, 2),
        int_y=eval_profile(p, xs, 0) - float(eval_profile(p, 0.0, 0)),
    )
    return y1, y2


def wronskian_drift(w: WavePoint, y1: Trajectory) -> float:
    """Max deviation of W(y1, phi') (c - phi)/(c - phi(0)) from 1 over a period."""
    p = w.profile
    period = y1.x <= 2.0 * np.pi + 1e-12
    xs = y1.x[period]
    phi = eval_profile(p, xs, 0)
    dphi = eval_profile(p, xs, 1)
    ddphi = eval_profile(p, xs, 2)
    wr = y1.y[period] * ddphi - y1.yp[period] * dphi
    gap0 = w.c - float(eval_profile(p, 0.0, 0))
    return float(np.max(np.abs(wr * (w.c - phi) / gap0 - 1.0)))


def extract_theta(
    w: WavePoint,
    y1: Trajectory,
    theta_scale: float | None = None,
) -> FloquetReport:
    """Floquet constant by the boundary-derivative formula, cross-checked
    against a least-squares fit of the affine monodromy relation
    y1(x + 2*pi) = y1(x) + theta * phi'(x)."""
    p = w.profile
    n_half = (len(y1.x) - 1) // 2
    i2pi = n_half
    phipp0 = float(eval_profile(p, 0.0, 2))
    theta = float(y1.yp[i2pi] / phipp0)

    xs = y1.x[: n_half + 1]
    jump = y1.y[n_half : 2 * n_half + 1] - y1.y[: n_half + 1]
    dphi = eval_profile(p, xs, 1)
    denom = float(np.dot(dphi, dphi))
    theta_fit = float(np.dot(jump, dphi) / denom) if denom > 0.0 else 0.0

    scale = max(abs(theta), abs(theta_fit))
    if abs(theta_fit - theta) > THETA_FIT_TOL * max(scale, 1e-12):
        raise InconsistentTheta(
            f"theta routes disagree: derivative {theta:.10e} vs monodromy fit {theta_fit:.10e} "
            "(under-resolved wave; increase n_modes)"
        )
    drift = wronskian_drift(w, y1)
    return FloquetReport(
        theta=theta,
        theta_fit=theta_fit,
        y1_deriv_2pi=float(y1.yp[i2pi]),
        phi2pp0=phipp0,
        wronskian_drift=drift,
        int_y1=float(y1.int_y[i2pi]),
        classification=classify_theta(theta, theta_scale),
    )

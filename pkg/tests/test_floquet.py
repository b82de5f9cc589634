import numpy as np
import pytest
from scipy.integrate import solve_ivp

from rchwave.errors import DomainError, InconsistentTheta
from rchwave.floquet import (
    classify_theta,
    extract_theta,
    fundamental_solutions,
    wronskian_drift,
)
from rchwave.spectral import eval_profile
from rchwave.waves import solve_at

OMEGA = 1.0


@pytest.fixture(scope="module")
def floq_mid(wave_mid96):
    y1, y2 = fundamental_solutions(wave_mid96)
    return wave_mid96, y1, y2


class TestFundamentalSolutions:
    def test_second_solution_is_periodic_derivative(self, floq_mid):
        # integrating the kernel equation from phi''s data reproduces phi',
        # confirming the interpolated coefficients are consistent
        w, y1, y2 = floq_mid
        p = w.profile
        phipp0 = float(eval_profile(p, 0.0, 2))

        def rhs(x, y):
            ph = float(eval_profile(p, x, 0))
            d1 = float(eval_profile(p, x, 1))
            d2 = float(eval_profile(p, x, 2))
            return [y[1], (d1 * y[1] + (w.c - w.omega - 3.0 * ph + d2) * y[0]) / (w.c - ph)]

        xs = np.linspace(0.0, 2 * np.pi, 257)
        sol = solve_ivp(rhs, (0.0, 2 * np.pi), (0.0, phipp0), rtol=1e-11, atol=1e-13,
                        t_eval=xs, method="DOP853")
        assert sol.success
        exact = eval_profile(p, xs, 1)
        assert np.max(np.abs(sol.y[0] - exact)) <= 1e-8 * max(np.max(np.abs(exact)), 1.0)

    def test_wronskian_abel_identity(self, floq_mid):
        w, y1, _ = floq_mid
        assert wronskian_drift(w, y1) <= 1e-8

    def test_initial_conditions(self, floq_mid):
        w, y1, _ = floq_mid
        phipp0 = float(eval_profile(w.profile, 0.0, 2))
        assert y1.y[0] == pytest.approx(1.0 / phipp0)
        assert y1.yp[0] == 0.0

    def test_trivial_wave_rejected(self, trivial_point):
        with pytest.raises(DomainError):
            fundamental_solutions(trivial_point)


class TestExtractTheta:
    def test_routes_agree(self, floq_mid):
        w, y1, _ = floq_mid
        rep = extract_theta(w, y1)
        assert abs(rep.theta_fit - rep.theta) <= 1e-5 * abs(rep.theta)

    def test_positive_theta_at_small_amplitude(self, wave_small):
        # d_c > 0 near onset, so zero is the second eigenvalue and the
        # Floquet constant is positive
        y1, _ = fundamental_solutions(wave_small)
        rep = extract_theta(wave_small, y1)
        assert rep.theta > 0.0
        assert rep.classification == "simple_second"

    def test_derivative_sign_relation(self, floq_mid):
        # y1'(2pi) = theta phi''(0) with phi''(0) < 0 at the crest
        w, y1, _ = floq_mid
        rep = extract_theta(w, y1)
        assert rep.phi2pp0 < 0.0
        assert rep.y1_deriv_2pi == pytest.approx(rep.theta * rep.phi2pp0, rel=1e-12)
        assert (rep.y1_deriv_2pi < 0.0) == (rep.theta > 0.0)

    def test_classification_matches_generalized_eigensolve(self, analysis_mid):
        pa = analysis_mid
        if pa.floquet.classification == "simple_second":
            assert pa.gen_zero_position == 1
        elif pa.floquet.classification == "simple_third":
            assert pa.gen_zero_position == 2

    def test_counts_within_theory_bounds(self, analysis_small, analysis_mid):
        for pa in (analysis_small, analysis_mid):
            assert pa.spec_L.n_neg in (1, 2)
            assert pa.spec_L.n_zero in (1, 2)

    def test_underresolved_wave_raises(self, g64):
        # at this resolution the monodromy fit degrades past the guard
        w = solve_at(0.85, OMEGA, g64)
        y1, _ = fundamental_solutions(w)
        with pytest.raises(InconsistentTheta):
            extract_theta(w, y1)

    def test_integral_of_growing_solution_identity(self, wave_mid):
        # int y1 = (c - phi(0)) h(0) y1'(2pi): links the deflated solve to
        # the initial-value route (the integral does not vanish in general)
        from rchwave.operators import assemble_L, solve_on_complement

        w = wave_mid
        y1, _ = fundamental_solutions(w)
        rep = extract_theta(w, y1)
        h = solve_on_complement(assemble_L(w), np.ones(w.grid.n_points), [w.derivative(1)])
        h0 = float(h[0])
        d0 = w.c - float(eval_profile(w.profile, 0.0))
        predicted = d0 * h0 * rep.y1_deriv_2pi
        assert abs(rep.int_y1 - predicted) <= 1e-6 * (1.0 + abs(rep.int_y1))


class TestClassify:
    def test_sign_map(self):
        assert classify_theta(3.0) == "simple_second"
        assert classify_theta(-3.0) == "simple_third"
        assert classify_theta(1e-9, theta_scale=1.0) == "double"

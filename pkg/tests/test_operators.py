import numpy as np
import pytest
import scipy.linalg

from conftest import rel_close
from rchwave.errors import NearSingular, SolvabilityViolation
from rchwave.operators import (
    LiouvilleData,
    OperatorMatrix,
    assemble_hill,
    assemble_L,
    assemble_L_pi,
    assemble_weighted_symmetrized,
    liouville,
    solve_on_complement,
)
from rchwave.spectral import eval_profile, inner, quadrature
from rchwave.waves import point_scalars, stokes_seed

OMEGA = 1.0


def eigenvalues(op):
    return scipy.linalg.eigh(op.entries, eigvals_only=True)


class TestAssembleL:
    def test_constant_coefficient_spectrum(self, trivial_point):
        # phi = 0: eigenvalues c k^2 + c - omega, k = -N..N collapsed to
        # multiplicity two for 0 < k < N
        ev = np.sort(eigenvalues(assemble_L(trivial_point)))
        c, om, n = trivial_point.c, trivial_point.omega, trivial_point.grid.n_modes
        expected = [c * 0 + c - om]
        for k in range(1, n):
            expected.extend([c * k * k + c - om] * 2)
        expected.append(c * n * n + c - om)
        assert np.max(np.abs(ev - np.sort(expected))) < 1e-10

    def test_symmetry(self, wave_mid):
        for op in (assemble_L(wave_mid), assemble_L_pi(wave_mid)):
            scale = np.max(np.abs(op.entries))
            assert np.max(np.abs(op.entries - op.entries.T)) < 1e-10 * scale

    def test_kernel_contains_phi_prime(self, wave_mid96):
        # the translation mode's top-mode tail couples back at O(N^3 a_N),
        # so this needs the resolved profile
        L = assemble_L(wave_mid96)
        dphi = wave_mid96.derivative(1)
        assert np.max(np.abs(L.apply(dphi))) <= 1e-8 * np.max(np.abs(dphi))

    def test_action_on_wave(self, wave_mid):
        # L phi = c (phi'' - phi) + omega phi - 2A
        w = wave_mid
        phi, ddphi = w.values(), w.derivative(2)
        out = assemble_L(w).apply(phi)
        expected = w.c * (ddphi - phi) + w.omega * phi - 2.0 * w.A
        assert np.max(np.abs(out - expected)) <= 1e-8

    def test_action_on_one(self, wave_mid):
        # L 1 = (c - omega) - 3 phi + phi''
        w = wave_mid
        out = assemble_L(w).apply(np.ones(w.grid.n_points))
        expected = (w.c - w.omega) - 3.0 * w.values() + w.derivative(2)
        assert np.max(np.abs(out - expected)) <= 1e-8


class TestAssembleLPi:
    def test_trivial_is_restriction(self, trivial_point):
        full = assemble_L(trivial_point)
        proj = assemble_L_pi(trivial_point)
        assert np.allclose(proj.entries, full.entries[1:, 1:])

    def test_kernel_contains_phi_prime(self, wave_mid96):
        LPi = assemble_L_pi(wave_mid96)
        dphi = wave_mid96.derivative(1)
        assert np.max(np.abs(LPi.apply(dphi))) <= 1e-8 * np.max(np.abs(dphi))

    def test_quadratic_form_on_wave(self, wave_mid):
        # <L_Pi phi, phi> = -c int phi'^2 + (omega - c) int phi^2 < 0
        w = wave_mid
        g = w.grid
        phi, dphi = w.values(), w.derivative(1)
        LPi = assemble_L_pi(w)
        form = inner(g, LPi.apply(phi), phi)
        expected = -w.c * inner(g, dphi, dphi) + (w.omega - w.c) * inner(g, phi, phi)
        assert rel_close(form, expected, 1e-8)
        # Poincare-Wirtinger bound for zero-mean profiles
        assert form <= (-2.0 * w.c + w.omega) * inner(g, phi, phi) + 1e-12


class TestLiouville:
    def test_trivial(self, trivial_point):
        ld = liouville(trivial_point)
        assert np.max(np.abs(ld.D)) < 1e-14
        assert np.max(np.abs(ld.Q - (trivial_point.c - OMEGA) / trivial_point.c)) < 1e-14
        assert np.all(ld.weight > 0)

    def test_phase_anchoring_and_periodicity(self, wave_mid):
        ld = liouville(wave_mid)
        assert ld.D[0] == 0.0
        # D(2pi) = ln((c - phi(2pi))/(c - phi(0))) = 0 by periodicity of phi
        p = wave_mid.profile
        d_2pi = np.log(
            (wave_mid.c - float(eval_profile(p, 2 * np.pi))) / (wave_mid.c - float(eval_profile(p, 0.0)))
        )
        assert abs(d_2pi) < 1e-12

    def test_small_amplitude_potential_linear_in_a(self, g64):
        sups = []
        for a in (0.025, 0.05):
            s = stokes_seed(a, OMEGA, g64)
            from rchwave.waves import newton_refine

            w = newton_refine(s.profile, s.c, OMEGA)
            ld = liouville(w)
            sups.append(np.max(np.abs(ld.Q - (w.c - OMEGA) / w.c)))
        assert 1.7 < sups[1] / sups[0] < 2.3


def _constant_potential_data(grid, q):
    zero = np.zeros(grid.n_points)
    return LiouvilleData(
        D=zero,
        Q=np.full(grid.n_points, q),
        weight=np.ones(grid.n_points),
        half_power=np.ones(grid.n_points),
        grid=grid,
        q_fine=np.full(grid.n_fine, q),
        gap_fine=np.ones(grid.n_fine),
    )


class TestHill:
    @pytest.mark.parametrize("q", [0.0, 1.7])
    def test_constant_potential_spectrum(self, g64, q):
        hill = assemble_hill(_constant_potential_data(g64, q))
        ev = np.sort(eigenvalues(hill))
        n = g64.n_modes
        expected = [q]
        for k in range(1, n):
            expected.extend([k * k + q] * 2)
        expected.append(n * n + q)
        assert np.max(np.abs(ev - np.sort(expected))) < 1e-10

    def test_kernel_function(self, wave_mid96):
        # the weighted derivative phi2 = phi' ((c-phi)/(c-phi0))^{1/2}
        # spans the periodic kernel of the reduced operator
        ld = liouville(wave_mid96)
        hill = assemble_hill(ld)
        phi2 = wave_mid96.derivative(1) / ld.half_power
        resid = np.max(np.abs(hill.apply(phi2))) / np.max(np.abs(phi2))
        assert resid <= 1e-7


class TestWeightedSymmetrized:
    def test_trivial_scaling(self, trivial_point):
        ld = liouville(trivial_point)
        hill = assemble_hill(ld)
        sms = assemble_weighted_symmetrized(trivial_point, hill)
        assert np.max(np.abs(sms.entries - trivial_point.c * hill.entries)) < 1e-10 * trivial_point.grid.n_modes**2

    def test_inertia_matches_linearized_operator(self, wave_small, wave_mid):
        from rchwave.stability import spectrum

        for w in (wave_small, wave_mid):
            L = assemble_L(w)
            hill = assemble_hill(liouville(w))
            sms = assemble_weighted_symmetrized(w, hill)
            sL, sS = spectrum(L), spectrum(sms)
            assert (sL.n_neg, sL.n_zero) == (sS.n_neg, sS.n_zero)

    def test_zero_eigenvector_maps_to_translation_mode(self, wave_mid96):
        from rchwave.stability import spectrum

        w = wave_mid96
        ld = liouville(w)
        hill = assemble_hill(ld)
        sms = assemble_weighted_symmetrized(w, hill)
        rep = spectrum(sms)
        assert rep.n_zero == 1
        wtil = rep.kernel_vectors[0]
        # SMS w = 0 means M (S w) = 0; mapping back through the change of
        # variables lands on the phi' direction
        s_field = np.sqrt(w.c - w.values())
        v = ld.half_power * s_field * wtil
        dphi = w.derivative(1)
        cos_sim = abs(np.dot(v, dphi)) / (np.linalg.norm(v) * np.linalg.norm(dphi))
        assert cos_sim > 1 - 1e-8


class TestSolveOnComplement:
    def test_integral_identity_for_inverse_of_one(self, wave_mid):
        # int L^{-1} 1 = 2 pi omega / d_c
        w = wave_mid
        L = assemble_L(w)
        h = solve_on_complement(L, np.ones(w.grid.n_points), [w.derivative(1)])
        int_h = quadrature(w.grid, h)
        d_c = point_scalars(w).d_c
        assert rel_close(int_h, 2 * np.pi * w.omega / d_c, 1e-4)

    def test_chi_closed_form(self, wave_mid):
        w = wave_mid
        g = w.grid
        L = assemble_L(w)
        dphi = w.derivative(1)
        phi = w.values()
        h = solve_on_complement(L, np.ones(g.n_points), [dphi])
        chi = solve_on_complement(L, phi, [dphi])
        p = 2.0 * w.c + w.omega
        chi_form = -w.c / p + phi / p + (w.c * (w.c - w.omega) + 2.0 * w.A) / p * h
        assert np.max(np.abs(chi - chi_form)) <= 1e-6

    def test_Phi_closed_form(self, wave_mid):
        w = wave_mid
        g = w.grid
        L = assemble_L(w)
        dphi = w.derivative(1)
        phi, ddphi = w.values(), w.derivative(2)
        h = solve_on_complement(L, np.ones(g.n_points), [dphi])
        big_phi = solve_on_complement(L, -ddphi, [dphi])
        p = 2.0 * w.c + w.omega
        form = (w.c - w.omega) / p - 3.0 * phi / p - ((w.c - w.omega) ** 2 + 6.0 * w.A) / p * h
        assert np.max(np.abs(big_phi - form)) <= 1e-6

    def test_combined_resolvent_identity(self, wave_mid):
        # L^{-1}(phi - phi'') = -omega/(2c+omega) - 2 phi/(2c+omega)
        #                       + (omega(c-omega) - 4A)/(2c+omega) L^{-1} 1
        w = wave_mid
        g = w.grid
        L = assemble_L(w)
        dphi = w.derivative(1)
        phi, ddphi = w.values(), w.derivative(2)
        h = solve_on_complement(L, np.ones(g.n_points), [dphi])
        sol = solve_on_complement(L, phi - ddphi, [dphi])
        p = 2.0 * w.c + w.omega
        form = -w.omega / p - 2.0 * phi / p + (w.omega * (w.c - w.omega) - 4.0 * w.A) / p * h
        assert np.max(np.abs(sol - form)) <= 1e-6

    def test_solvability_violation(self, wave_mid):
        dphi = wave_mid.derivative(1)
        with pytest.raises(SolvabilityViolation):
            solve_on_complement(assemble_L(wave_mid), dphi, [dphi])

    def test_near_singular(self, g64):
        entries = np.eye(g64.n_points)
        entries[0, 0] = 1e-15
        op = OperatorMatrix(entries=entries, kind="L", basis="full", grid=g64)
        with pytest.raises(NearSingular):
            solve_on_complement(op, np.ones(g64.n_points), [])

    def test_solution_orthogonal_to_kernel(self, wave_mid):
        w = wave_mid
        dphi = w.derivative(1)
        h = solve_on_complement(assemble_L(w), np.ones(w.grid.n_points), [dphi])
        assert abs(inner(w.grid, h, dphi)) < 1e-10 * np.max(np.abs(h))

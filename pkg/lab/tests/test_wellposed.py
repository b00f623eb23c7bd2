"""
Tests for the Duhamel quadrature, the wave evolution and the Picard solvers.
"""
import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from lab.core import Field, Potential, SpaceTimeField, make_grid, sample_function, seeded_random_field, weight_model
from lab.exceptions import GridError, ParameterRangeError, PicardDivergenceError
from lab.norms import field_l2_norm, weighted_l2_norm
from lab.spectral import apply_multiplier, propagate_orbit, schrodinger_symbol
from lab.wellposed import (
    duhamel_integral,
    first_contraction,
    homogeneous_wave,
    mass_drift,
    picard_solve,
    potential_rescale,
    wave_energy,
    wellposedness_inequalities,
)


def plane_wave_forcing(grid, xi):
    return sample_function(grid, lambda t, x: np.exp(1j * xi * x) + 0 * t, kind='spacetime')


def gaussian_potential(grid, amplitude, width=1.0):
    profile = weight_model(grid, 'gaussian', width=width)
    return Potential(grid, amplitude * profile.values)


class DuhamelTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(1, 16, math.pi, 257, 1.0)
        self.t = self.grid.times[:, np.newaxis]
        self.x = self.grid.coordinates[np.newaxis, :]

    def test_zero_forcing(self):
        zero = SpaceTimeField(self.grid, np.zeros(self.grid.shape))
        for kind, gamma in (('schrodinger', 2), ('wave', 2), ('kdv', 3)):
            with self.subTest(kind=kind):
                self.assertEqual(np.max(np.abs(duhamel_integral(zero, gamma, kind).values)), 0.0)

    def test_zero_mode_is_integrated_exactly(self):
        constant = SpaceTimeField(self.grid, np.ones(self.grid.shape))
        output = duhamel_integral(constant, 2, 'schrodinger')
        assert_allclose(output.values, np.broadcast_to(self.t, self.grid.shape), atol=1e-13)
        # the wave kernel drops the zero mode
        assert_allclose(duhamel_integral(constant, 2, 'wave').values, 0.0, atol=1e-14)

    def test_schrodinger_plane_wave(self):
        xi = 2.0
        theta = xi ** 2
        expected = (1 - np.exp(-1j * self.t * theta)) / (1j * theta) * np.exp(1j * xi * self.x)
        output = duhamel_integral(plane_wave_forcing(self.grid, xi), 2, 'schrodinger')
        assert_allclose(output.values, expected, atol=1e-3)
        self.assertEqual(np.max(np.abs(output.values[self.grid.time_zero_index])), 0.0)

    def test_wave_plane_wave(self):
        xi = 2.0
        expected = (1 - np.cos(self.t * xi)) / xi ** 2 * np.exp(1j * xi * self.x)
        output = duhamel_integral(plane_wave_forcing(self.grid, xi), 2, 'wave')
        assert_allclose(output.values, expected, atol=1e-3)

    def test_kdv_plane_wave(self):
        xi = 1.0
        # e^(-(t-s) d_x^3) multiplies e^(i xi x) by e^(i (t-s) xi^3)
        expected = (np.exp(1j * self.t * xi ** 3) - 1) / (1j * xi ** 3) * np.exp(1j * xi * self.x)
        output = duhamel_integral(plane_wave_forcing(self.grid, xi), 3, 'kdv')
        assert_allclose(output.values, expected, atol=1e-3)

    def test_second_order_in_time(self):
        xi = 2.0
        errors = []
        for Nt in (33, 65):
            grid = make_grid(1, 16, math.pi, Nt, 1.0)
            t = grid.times[:, np.newaxis]
            expected = (1 - np.exp(-1j * t * xi ** 2)) / (1j * xi ** 2) * np.exp(1j * xi * grid.coordinates)
            output = duhamel_integral(plane_wave_forcing(grid, xi), 2, 'schrodinger')
            errors.append(np.max(np.abs(output.values - expected)))
        self.assertAlmostEqual(errors[0] / errors[1], 4.0, delta=0.8)

    def test_output_solves_the_forced_equation(self):
        # v = -i D(F) satisfies i v_t - |xi|^2 v = F; the residual is O(dt^2)
        residuals = []
        for Nt in (129, 257):
            grid = make_grid(1, 16, math.pi, Nt, 1.0)
            F = sample_function(grid, lambda t, x: (np.exp(1j * x) + 0.5 * np.exp(-1j * x)) * np.cos(t), kind='spacetime')
            v = duhamel_integral(F, 2) * (-1j)
            v_t = np.gradient(v.values, grid.dt, axis=0)
            residual = 1j * v_t - apply_multiplier(v, schrodinger_symbol(grid, 2)).values - F.values
            residuals.append(np.max(np.abs(residual[1:-1])))
        self.assertLess(residuals[1], 1e-4)
        self.assertAlmostEqual(residuals[0] / residuals[1], 4.0, delta=0.8)

    def test_rejected_inputs(self):
        even = make_grid(1, 16, math.pi, 32, 1.0)
        with self.assertRaises(GridError):
            duhamel_integral(plane_wave_forcing(even, 1.0), 2)
        forcing = plane_wave_forcing(self.grid, 1.0)
        with self.assertRaises(ParameterRangeError):
            duhamel_integral(forcing, 1, 'wave')
        with self.assertRaises(ParameterRangeError):
            duhamel_integral(forcing, 2, 'kdv')
        with self.assertRaises(ParameterRangeError):
            duhamel_integral(forcing, 2, 'heat')


class WaveTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(2, 16, math.pi, 17, 2.0)
        self.t = self.grid.times.reshape(-1, 1, 1)

    def test_plane_waves(self):
        xs = self.grid.spatial_axes()
        wave = Field(self.grid, np.exp(1j * (3 * xs[0] + 4 * xs[1])))
        zero = Field(self.grid, np.zeros(self.grid.spatial_shape))
        rho = 5.0
        assert_allclose(homogeneous_wave(wave, None, 2).values, np.cos(self.t * rho) * wave.values, atol=1e-12)
        assert_allclose(homogeneous_wave(zero, wave, 2).values, np.sin(self.t * rho) / rho * wave.values, atol=1e-12)

    def test_energy_is_conserved(self):
        f = seeded_random_field(self.grid, 1, band=(1.0, 6.0))
        g = seeded_random_field(self.grid, 2, band=(1.0, 6.0))
        for gamma in (2, 3):
            initial = wave_energy(f, g, gamma, 0.0)
            for t in (0.5, 3.0, -7.0):
                with self.subTest(gamma=gamma, t=t):
                    assert_allclose(wave_energy(f, g, gamma, t), initial, rtol=1e-10)

    def test_order_below_two(self):
        f = seeded_random_field(self.grid, 1)
        with self.assertRaises(ParameterRangeError):
            homogeneous_wave(f, None, 1)


class PicardTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(1, 64, 8.0, 33, 1.0)
        self.f = seeded_random_field(self.grid, 3, band=(0.0, 3.0))
        self.zero = Potential(self.grid, np.zeros(self.grid.shape))

    def test_free_evolution_without_potential(self):
        u, report = picard_solve(self.f, self.zero)
        self.assertTrue(report.converged)
        self.assertEqual(report.iterations, 1)
        self.assertEqual(report.residual, 0.0)
        expected = propagate_orbit(self.f, schrodinger_symbol(self.grid, 2), sign=-1)
        assert_allclose(u.values, expected.values, atol=1e-14)

    def test_forcing_only(self):
        F = sample_function(self.grid, lambda t, x: np.exp(-x ** 2 - t ** 2), kind='spacetime')
        zero_data = Field(self.grid, np.zeros(self.grid.N))
        u, _ = picard_solve(zero_data, self.zero, F=F)
        assert_allclose(u.values, -1j * duhamel_integral(F, 2).values, atol=1e-14)

    def test_small_potential_contracts(self):
        u, report = picard_solve(self.f, gaussian_potential(self.grid, 0.1), tol=1e-10)
        self.assertTrue(report.converged)
        self.assertTrue(all(estimate < 0.5 for estimate in report.contraction_estimates))
        self.assertLessEqual(report.residual, 1e-9)
        self.assertEqual(report.max_contraction, max(report.contraction_estimates))

    def test_wave_without_potential(self):
        grid = make_grid(2, 16, 4.0, 17, 1.0)
        f = seeded_random_field(grid, 1, band=(0.5, 3.0))
        g = seeded_random_field(grid, 2, band=(0.5, 3.0))
        zero = Potential(grid, np.zeros(grid.shape))
        u, report = picard_solve(f, zero, gamma=2, kind='wave', g=g)
        self.assertTrue(report.converged)
        assert_allclose(u.values, homogeneous_wave(f, g, 2).values, atol=1e-14)

    def test_kdv_with_small_potential(self):
        u, report = picard_solve(self.f, gaussian_potential(self.grid, 0.1), gamma=3, kind='kdv', tol=1e-10)
        self.assertTrue(report.converged)
        self.assertEqual(u.values.shape, self.grid.shape)

    def test_linear_in_data_and_forcing(self):
        V = gaussian_potential(self.grid, 0.1)
        F = sample_function(self.grid, lambda t, x: np.exp(-x ** 2 - t ** 2), kind='spacetime')
        for forcing in (None, F):
            with self.subTest(forcing=forcing is not None):
                doubled_forcing = forcing * 2 if forcing is not None else None
                single, _ = picard_solve(self.f, V, F=forcing, tol=1e-12)
                double, report = picard_solve(self.f * 2, V, F=doubled_forcing, tol=1e-12)
                self.assertTrue(report.converged)
                assert_allclose(double.values, 2 * single.values, atol=1e-9)

    def test_fixed_point_satisfies_the_integral_equation(self):
        tol = 1e-10
        V = gaussian_potential(self.grid, 0.1)
        F = sample_function(self.grid, lambda t, x: np.exp(-x ** 2 - t ** 2), kind='spacetime')
        u, report = picard_solve(self.f, V, F=F, tol=tol)
        self.assertTrue(report.converged)
        # substitute into u = e^(-it|xi|^2) f - i int_0^t e^(-i(t-s)|xi|^2) (F - V u) ds
        source = F - u.with_values(V.values * u.values)
        rhs = propagate_orbit(self.f, schrodinger_symbol(self.grid, 2), sign=-1) + duhamel_integral(source, 2) * (-1j)
        self.assertLessEqual(weighted_l2_norm(u - rhs, V.magnitude()), 10 * tol)

    def test_contraction_grows_with_the_potential(self):
        potentials = {
            'gaussian': gaussian_potential(self.grid, 0.4),
            'cube': Potential(self.grid, 0.4 * weight_model(self.grid, 'cube', half_side=1.0).values),
        }
        for name, V in potentials.items():
            with self.subTest(potential=name):
                estimates = [first_contraction(self.f, V.scaled(c)) for c in (0.125, 0.25, 0.5, 1.0)]
                self.assertEqual(estimates, sorted(estimates))
                self.assertGreater(estimates[0], 0.0)
                # the operator and the L^2(|V|) norm are both homogeneous in V
                assert_allclose(estimates, [c * estimates[-1] for c in (0.125, 0.25, 0.5, 1.0)], rtol=1e-10)

    def test_large_potential_diverges(self):
        V = Potential(self.grid, np.full(self.grid.shape, 50.0))
        with self.assertRaises(PicardDivergenceError):
            picard_solve(self.f, V)

    def test_iteration_cap(self):
        with self.assertLogs('lab.wellposed', 'WARNING'):
            _, report = picard_solve(self.f, gaussian_potential(self.grid, 0.1), tol=1e-14, max_iter=2)
        self.assertFalse(report.converged)
        self.assertEqual(report.iterations, 2)

    def test_rescale(self):
        scale, small, contraction = potential_rescale(self.f, gaussian_potential(self.grid, 20.0))
        self.assertLess(scale, 1.0)
        self.assertLess(contraction, 0.5)
        assert_allclose(small.values, scale * gaussian_potential(self.grid, 20.0).values)
        self.assertEqual(potential_rescale(self.f, gaussian_potential(self.grid, 0.01))[0], 1.0)

    def test_grids_must_match(self):
        other = make_grid(1, 64, 4.0, 33, 1.0)
        with self.assertRaises(GridError):
            picard_solve(seeded_random_field(other, 1), self.zero)


class InequalityTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(1, 64, 8.0, 33, 1.0)
        self.f = seeded_random_field(self.grid, 5, band=(0.0, 3.0))

    def test_free_evolution(self):
        zero = Potential(self.grid, np.zeros(self.grid.shape))
        u, _ = picard_solve(self.f, zero)
        report = wellposedness_inequalities(u, self.f, zero, 1.5)
        self.assertAlmostEqual(report.lhs2, field_l2_norm(self.f), places=10)
        self.assertAlmostEqual(report.rhs2, field_l2_norm(self.f), places=12)
        self.assertEqual((report.lhs1, report.rhs1, report.ratio1), (0.0, 0.0, 0.0))

    def test_both_sides_are_linear(self):
        V = gaussian_potential(self.grid, 0.1)
        F = sample_function(self.grid, lambda t, x: np.exp(-x ** 2 - t ** 2), kind='spacetime')
        u, _ = picard_solve(self.f, V, tol=1e-12)
        u2, _ = picard_solve(self.f * 2, V, tol=1e-12)
        single = wellposedness_inequalities(u, self.f, V, 1.5)
        double = wellposedness_inequalities(u2, self.f * 2, V, 1.5)
        assert_allclose([double.lhs1, double.lhs2], [2 * single.lhs1, 2 * single.lhs2], rtol=1e-8)
        assert_allclose([double.rhs1, double.rhs2], [2 * single.rhs1, 2 * single.rhs2], rtol=1e-12)
        self.assertTrue(0 < single.ratio1 < math.inf)

        u, _ = picard_solve(self.f, V, F=F, tol=1e-12)
        u2, _ = picard_solve(self.f * 2, V, F=F * 2, tol=1e-12)
        single = wellposedness_inequalities(u, self.f, V, 1.5, F=F)
        double = wellposedness_inequalities(u2, self.f * 2, V, 1.5, F=F * 2)
        assert_allclose(
            [double.lhs1, double.rhs1, double.lhs2, double.rhs2],
            [2 * single.lhs1, 2 * single.rhs1, 2 * single.lhs2, 2 * single.rhs2],
            rtol=1e-8,
        )

    def test_ratios_are_stable_under_refinement(self):
        cases = [(0.0, 0.1, 0.0), (1.0, 0.1, 0.5), (2.0, 0.08, 1.0), (-1.5, 0.05, 0.3), (0.5, 0.1, 0.0)]
        for xi, amplitude, forcing in cases:
            with self.subTest(xi=xi, amplitude=amplitude, forcing=forcing):
                ratios = []
                for N in (64, 128):
                    grid = make_grid(1, N, 8.0, 33, 1.0)
                    f = sample_function(grid, lambda x: np.exp(1j * xi * x - (x - 1) ** 2))
                    V = gaussian_potential(grid, amplitude)
                    F = None
                    if forcing:
                        F = sample_function(grid, lambda t, x: forcing * np.exp(-x ** 2 - t ** 2), kind='spacetime')
                    u, report = picard_solve(f, V, F=F, tol=1e-10)
                    self.assertTrue(report.converged)
                    bounds = wellposedness_inequalities(u, f, V, 1.5, F=F, refine=True)
                    ratios.append((bounds.ratio1, bounds.ratio2))
                (coarse1, coarse2), (fine1, fine2) = ratios
                self.assertTrue(0 < fine1 < math.inf and 0 < fine2 < math.inf)
                assert_allclose(fine1, coarse1, rtol=0.1)
                assert_allclose(fine2, coarse2, rtol=0.1)

    def test_wave_kind(self):
        grid = make_grid(2, 16, 4.0, 17, 1.0)
        f = seeded_random_field(grid, 1, band=(0.5, 3.0))
        g = seeded_random_field(grid, 2, band=(0.5, 3.0))
        V = gaussian_potential(grid, 0.1)
        u, _ = picard_solve(f, V, gamma=2, kind='wave', g=g)
        report = wellposedness_inequalities(u, f, V, 1.5, gamma=2, kind='wave', g=g)
        self.assertTrue(all(np.isfinite([report.lhs1, report.rhs1, report.lhs2, report.rhs2])))
        self.assertGreater(report.rhs2, 0.0)


class MassDriftTests(SimpleTestCase):

    def test_free_evolution_conserves_mass(self):
        grid = make_grid(1, 64, 8.0, 33, 1.0)
        f = seeded_random_field(grid, 2)
        u = propagate_orbit(f, schrodinger_symbol(grid, 2), sign=-1)
        self.assertLessEqual(mass_drift(u, Potential(grid, np.zeros(grid.shape))), 1e-10)

    def test_drift_is_second_order(self):
        drifts = []
        for Nt in (65, 129):
            grid = make_grid(1, 64, 8.0, Nt, 0.5)
            f = seeded_random_field(grid, 2, band=(0.0, 3.0))
            V = gaussian_potential(grid, 0.5)
            u, report = picard_solve(f, V, tol=1e-13, max_iter=100)
            self.assertTrue(report.converged)
            drifts.append(mass_drift(u, V))
        self.assertAlmostEqual(drifts[0] / drifts[1], 4.0, delta=0.8)

    def test_complex_potential_is_refused(self):
        grid = make_grid(1, 16, 2.0, 5, 1.0)
        u = SpaceTimeField(grid, np.ones(grid.shape))
        with self.assertRaises(ParameterRangeError):
            mass_drift(u, 1j * np.ones(grid.shape))

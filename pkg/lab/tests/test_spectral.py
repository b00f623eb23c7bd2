"""
Tests for the Fourier transform, propagators and Littlewood-Paley pieces.
"""
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from lab.core import Field, make_grid, sample_function, seeded_random_field
from lab.exceptions import SpectralError
from lab.norms import field_l2_norm
from lab.spectral import (
    CUTOFF,
    Spectrum,
    airy_propagate,
    apply_multiplier,
    cutoff_phi,
    dft_forward,
    dft_inverse,
    fractional_derivative,
    half_wave_propagate,
    littlewood_paley_project,
    propagate,
    propagate_orbit,
    schrodinger_symbol,
)

# Forward then inverse transform of unit-norm data
DFT_ROUND_TRIP_TOLERANCE = 1e-12


def direct_coefficients(field):
    """Fourier coefficients by the defining Riemann sum, one axis at a time."""
    grid = field.grid
    kernel = np.exp(-1j * np.outer(grid.frequencies, grid.coordinates))
    coefficients = np.asarray(field.values)
    for axis in range(grid.n):
        coefficients = np.moveaxis(np.tensordot(kernel, coefficients, axes=([1], [axis])), 0, axis)
    return coefficients * grid.dx ** grid.n / (2 * grid.L) ** (grid.n / 2)


class TransformTests(SimpleTestCase):

    def test_parseval(self):
        grid = make_grid(2, 16, 3.0, 3, 1.0)
        f = seeded_random_field(grid, 11)
        coefficients = dft_forward(f).coefficients
        self.assertAlmostEqual(np.sum(np.abs(coefficients) ** 2), field_l2_norm(f) ** 2, places=12)

    def test_round_trip(self):
        grid = make_grid(1, 64, 2.0, 3, 1.0)
        f = seeded_random_field(grid, 5)
        assert_allclose(dft_inverse(dft_forward(f)).values, f.values, atol=DFT_ROUND_TRIP_TOLERANCE)

    def test_matches_direct_sum_in_one_dimension(self):
        grid = make_grid(1, 32, 1.5, 3, 1.0)
        f = seeded_random_field(grid, 2)
        assert_allclose(dft_forward(f).coefficients, direct_coefficients(f), atol=1e-9)

    def test_matches_direct_sum_in_two_dimensions(self):
        grid = make_grid(2, 16, 1.0, 3, 1.0)
        f = seeded_random_field(grid, 4)
        assert_allclose(dft_forward(f).coefficients, direct_coefficients(f), atol=1e-9)

    def test_spectrum_shape_is_checked(self):
        grid = make_grid(1, 16, 1.0, 3, 1.0)
        with self.assertRaises(SpectralError):
            Spectrum(grid, np.zeros(8))


class PropagatorTests(SimpleTestCase):
    """The evolution groups are unitary and act on plane waves by their symbols."""

    def setUp(self):
        self.grid = make_grid(1, 64, 4.0, 9, 1.0)

    def test_unitarity(self):
        for seed in range(20):
            f = seeded_random_field(self.grid, seed)
            for t in (0.1, 1.0, 3.0):
                for gamma in (1, 2, 3, 4):
                    with self.subTest(seed=seed, t=t, gamma=gamma):
                        self.assertAlmostEqual(field_l2_norm(propagate(f, t, gamma)), 1.0, delta=1e-10)
                        self.assertAlmostEqual(field_l2_norm(half_wave_propagate(f, t, gamma)), 1.0, delta=1e-10)
                self.assertAlmostEqual(field_l2_norm(airy_propagate(f, t, 1)), 1.0, delta=1e-10)

    def test_plane_wave_phases(self):
        xi = self.grid.frequencies[3]
        wave = sample_function(self.grid, lambda x: np.exp(1j * xi * x))
        t = 0.7
        assert_allclose(propagate(wave, t, 2).values, np.exp(-1j * t * xi ** 2) * wave.values, atol=1e-12)
        assert_allclose(half_wave_propagate(wave, t, 2).values, np.exp(1j * t * xi) * wave.values, atol=1e-12)
        # k = 1: e^(-t d_x^3) multiplies e^(i xi x) by e^(i t xi^3)
        assert_allclose(airy_propagate(wave, t, 1).values, np.exp(1j * t * xi ** 3) * wave.values, atol=1e-12)

    def test_orbit_matches_single_time_propagation(self):
        f = seeded_random_field(self.grid, 9)
        orbit = propagate_orbit(f, schrodinger_symbol(self.grid, 2), sign=-1)
        for index in (0, 4, 8):
            expected = propagate(f, self.grid.times[index], 2).values
            assert_allclose(orbit.values[index], expected, atol=1e-12)

    def test_rejected_parameters(self):
        f = seeded_random_field(self.grid, 1)
        with self.assertRaises(SpectralError):
            propagate(f, 1.0, 0.5)
        with self.assertRaises(SpectralError):
            airy_propagate(f, 1.0, 0)
        plane = make_grid(2, 8, 1.0, 3, 1.0)
        with self.assertRaises(SpectralError):
            airy_propagate(seeded_random_field(plane, 1), 1.0, 1)

    def test_non_finite_multiplier(self):
        f = seeded_random_field(self.grid, 1)
        with self.assertRaises(SpectralError):
            apply_multiplier(f, lambda xi: 1.0 / xi)

    def test_fractional_derivative(self):
        constant = Field(self.grid, np.ones(self.grid.N))
        assert_allclose(fractional_derivative(constant, -1.0).values, 0.0, atol=1e-14)
        xi = self.grid.frequencies[5]
        wave = sample_function(self.grid, lambda x: np.exp(1j * xi * x))
        assert_allclose(fractional_derivative(wave, 0.5).values, abs(xi) ** 0.5 * wave.values, atol=1e-12)


class LittlewoodPaleyTests(SimpleTestCase):

    def test_partition_of_unity(self):
        t = np.geomspace(2.0 ** -10, 2.0 ** 10, 10000)
        assert_allclose(CUTOFF.partition_sum(t, range(-12, 13)), 1.0, atol=1e-12)

    def test_support(self):
        self.assertEqual(cutoff_phi(0.5), 0.0)
        self.assertEqual(cutoff_phi(2.0), 0.0)
        self.assertEqual(cutoff_phi(0.0), 0.0)
        self.assertGreater(cutoff_phi(1.0), 0.0)

    def test_distant_pieces_are_orthogonal(self):
        grid = make_grid(1, 256, np.pi, 3, 1.0)
        f = seeded_random_field(grid, 3)
        for k, j in ((0, 2), (1, 4), (-1, 3)):
            with self.subTest(k=k, j=j):
                both = littlewood_paley_project(littlewood_paley_project(f, j), k)
                self.assertLess(np.max(np.abs(both.values)), 1e-12)

    def test_pieces_reconstruct_zero_mean_field(self):
        grid = make_grid(1, 64, np.pi, 3, 1.0)
        f = seeded_random_field(grid, 8, band=(0.5, 100.0))
        total = sum(littlewood_paley_project(f, k).values for k in range(-3, 8))
        assert_allclose(total, f.values, atol=1e-12)

"""
Tests for grids, sampled containers and model weights.
"""
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from lab.core import (
    EstimateParams,
    Field,
    Potential,
    SpaceTimeField,
    Weight,
    make_grid,
    sample_function,
    seeded_random_field,
    weight_model,
)
from lab.exceptions import GridError, ParameterRangeError, SampleError
from lab.spectral import dft_forward


class GridTests(SimpleTestCase):
    """Node placement and validation of GridSpec."""

    def setUp(self):
        self.grid = make_grid(1, 16, 2.0, 9, 1.0)

    def test_nodes_hit_origin_exactly(self):
        self.assertEqual(self.grid.coordinates[0], -2.0)
        self.assertEqual(self.grid.coordinates[8], 0.0)
        self.assertEqual(self.grid.times[4], 0.0)
        self.assertEqual(self.grid.times[0], -1.0)
        self.assertEqual(self.grid.times[-1], 1.0)

    def test_steps_and_shapes(self):
        self.assertEqual(self.grid.dx, 0.25)
        self.assertEqual(self.grid.dt, 0.25)
        self.assertEqual(self.grid.shape, (9, 16))
        self.assertEqual(make_grid(2, 8, 1.0, 3, 1.0).shape, (3, 8, 8))

    def test_frequencies_in_fft_order(self):
        assert_allclose(self.grid.frequencies[:3], [0.0, np.pi / 2, np.pi])
        self.assertLess(self.grid.frequencies[-1], 0)
        assert_allclose(self.grid.frequency_magnitude, np.abs(self.grid.frequencies))

    def test_invalid_grids_are_rejected(self):
        for arguments in [(1, 12, 1.0, 5, 1.0), (1, 4, 1.0, 5, 1.0), (1, 16, 1.0, 1, 1.0),
                          (1, 16, 0.0, 5, 1.0), (1, 16, 1.0, 5, -1.0), (0, 16, 1.0, 5, 1.0)]:
            with self.subTest(arguments=arguments):
                with self.assertRaises(GridError):
                    make_grid(*arguments)

    def test_time_zero_index_needs_odd_nt(self):
        self.assertEqual(self.grid.time_zero_index, 4)
        with self.assertRaises(GridError):
            make_grid(1, 16, 1.0, 8, 1.0).time_zero_index

    def test_coordinate_round_trip(self):
        for j in (0, 3, 8, 15):
            self.assertEqual(self.grid.coordinate_to_index(self.grid.index_to_coordinate((j,))), (j,))
        self.assertEqual(self.grid.time_to_index(0.0), 4)

    def test_dyadic_rescale(self):
        rescaled = self.grid.dyadic_rescale(1, 2)
        self.assertEqual((rescaled.L, rescaled.T), (1.0, 0.25))
        self.assertEqual((rescaled.N, rescaled.Nt), (16, 9))
        self.assertTrue(self.grid.dyadic_rescale(0, 2).compatible_with(self.grid))


class ContainerTests(SimpleTestCase):
    """Immutability and validation of the sampled containers."""

    def setUp(self):
        self.grid = make_grid(1, 8, 1.0, 3, 1.0)

    def test_values_are_copied_and_read_only(self):
        raw = np.ones(8)
        field = Field(self.grid, raw)
        raw[0] = 5.0
        self.assertEqual(field.values[0], 1.0)
        self.assertFalse(field.values.flags.writeable)

    def test_shape_mismatch(self):
        with self.assertRaises(SampleError):
            Field(self.grid, np.ones(7))
        with self.assertRaises(SampleError):
            SpaceTimeField(self.grid, np.ones(8))

    def test_non_finite_sample_names_index(self):
        values = np.ones(8)
        values[5] = np.nan
        with self.assertRaisesMessage(SampleError, '(5,)'):
            Field(self.grid, values)

    def test_weight_must_be_real_and_nonnegative(self):
        with self.assertRaises(SampleError):
            Weight(self.grid, -np.ones(self.grid.shape))
        with self.assertRaises(SampleError):
            Weight(self.grid, 1j * np.ones(self.grid.shape))

    def test_potential_may_change_sign(self):
        values = np.linspace(-1, 1, 24).reshape(self.grid.shape)
        potential = Potential(self.grid, values)
        assert_array_equal(potential.magnitude().values, np.abs(values))
        assert_array_equal(potential.scaled(0.5).values, values / 2)

    def test_field_arithmetic(self):
        f = Field(self.grid, np.arange(8.0))
        assert_array_equal((2 * f - f).values, f.values)

    def test_estimate_params(self):
        params = EstimateParams.homogeneous(1, 2, 0.25, 1.5)
        self.assertEqual(params.alpha, 2.5)
        self.assertTrue(params.is_homogeneous)
        with self.assertRaises(ParameterRangeError):
            EstimateParams(1, 0.5, 0.0, 2.0, 1.0)
        with self.assertRaises(ParameterRangeError):
            EstimateParams(1, 2.0, 0.0, 0.5, 1.0)


class SamplingTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(1, 16, 2.0, 5, 1.0)

    def test_spatial_rule(self):
        f = sample_function(self.grid, lambda x: x ** 2)
        assert_allclose(f.values.real, self.grid.coordinates ** 2)

    def test_spacetime_rule_receives_time_first(self):
        w = sample_function(self.grid, lambda t, x: np.abs(t) + 0 * x, kind='weight')
        assert_allclose(w.values[:, 3], np.abs(self.grid.times))

    def test_constant_rule_broadcasts(self):
        w = sample_function(self.grid, lambda t, x: 2.0, kind='weight')
        self.assertEqual(w.values.shape, self.grid.shape)

    def test_singular_rule_is_reported(self):
        with self.assertRaises(SampleError):
            sample_function(self.grid, lambda x: 1 / x)

    def test_unknown_kind(self):
        with self.assertRaises(SampleError):
            sample_function(self.grid, lambda x: x, kind='tensor')


class RandomFieldTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(1, 64, 4.0, 3, 1.0)

    def test_same_seed_same_field(self):
        first = seeded_random_field(self.grid, 7)
        second = seeded_random_field(self.grid, 7)
        assert_array_equal(first.values, second.values)
        self.assertFalse(np.array_equal(first.values, seeded_random_field(self.grid, 8).values))

    def test_unit_norm(self):
        f = seeded_random_field(self.grid, 3, band=(1.0, 5.0))
        self.assertAlmostEqual(np.sum(np.abs(f.values) ** 2) * self.grid.dx, 1.0, places=12)

    def test_band_support(self):
        f = seeded_random_field(self.grid, 3, band=(1.0, 5.0))
        coefficients = dft_forward(f).coefficients
        outside = (self.grid.frequency_magnitude < 1.0) | (self.grid.frequency_magnitude > 5.0)
        self.assertLess(np.max(np.abs(coefficients[outside])), 1e-12)

    def test_empty_band(self):
        with self.assertRaises(SampleError):
            seeded_random_field(self.grid, 3, band=(0.1, 0.2))


class WeightModelTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(1, 32, 2.0, 9, 1.0)

    def test_constant(self):
        assert_array_equal(weight_model(self.grid, 'constant', value=3.0).values, 3.0)

    def test_power_singular_node_takes_neighbour_average(self):
        w = weight_model(self.grid, 'power', exponent=0.5)
        centre = self.grid.coordinate_to_index((0.0,))[0]
        row = w.values[0]
        self.assertTrue(np.isfinite(row[centre]))
        self.assertAlmostEqual(row[centre], (row[centre - 1] + row[centre + 1]) / 2)

    def test_cube_with_time_interval(self):
        w = weight_model(self.grid, 'cube', half_side=0.5, time_interval=(0.0, 1.0))
        self.assertEqual(w.values[0].sum(), 0.0)
        self.assertEqual(w.values[-1].sum(), 9.0)

    def test_slab_drifts_with_time(self):
        w = weight_model(self.grid, 'slab', M=1.0)
        middle = self.grid.time_zero_index
        self.assertEqual(w.values[middle, self.grid.coordinate_to_index((0.0,))[0]], 1.0)
        self.assertEqual(w.values[middle, self.grid.coordinate_to_index((0.5,))[0]], 0.0)

    def test_cells_are_constant_on_blocks(self):
        w = weight_model(self.grid, 'cells', seed=1, cell=8)
        block = w.values[0, :8]
        assert_array_equal(block, block[0])
        with self.assertRaises(SampleError):
            weight_model(self.grid, 'cells', seed=1, cell=5)

    def test_unknown_model(self):
        with self.assertRaises(SampleError):
            weight_model(self.grid, 'triangle')

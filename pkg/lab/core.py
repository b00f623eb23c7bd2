"""
Grids, sampled fields and weights shared by every other lab module.

Particularly Important Module:
    All numerical arrays in the lab are laid out time-first. A space-time
    array has shape ``(Nt, N, ..., N)`` with ``n`` spatial axes, a spatial
    array has shape ``(N, ..., N)``. Spatial nodes sit at ``x_j = -L + j dx``
    for ``j = 0 .. N-1`` (the periodic box ``[-L, L)^n``) and time nodes at
    ``t_i = -T + i dt`` for ``i = 0 .. Nt-1`` (both endpoints included).
    Nodes are computed from integer ratios so that ``x = 0`` and, for odd
    ``Nt``, ``t = 0`` are represented exactly.

    Every container is immutable after construction: values are copied on
    the way in and the stored arrays are flagged read-only.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft

from .constants import GRID_MIN_POINTS, GRID_MIN_TIME_POINTS
from .exceptions import GridError, ParameterRangeError, SampleError

logger = logging.getLogger(__name__)


def _frozen_array(values, dtype):
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class GridSpec:
    """
    Periodic spatial box ``[-L, L)^n`` sampled with ``N`` points per axis,
    times the closed window ``[-T, T]`` sampled with ``Nt`` points.
    """

    n: int
    N: int
    L: float
    Nt: int
    T: float

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def dt(self):
        return 2.0 * self.T / (self.Nt - 1)

    @property
    def spatial_shape(self):
        return (self.N,) * self.n

    @property
    def shape(self):
        return (self.Nt,) + self.spatial_shape

    @property
    def cell_volume(self):
        """Spatial quadrature weight ``dx^n``."""
        return self.dx ** self.n

    @property
    def box_measure(self):
        return (2.0 * self.L) ** self.n

    @cached_property
    def coordinates(self):
        """Node coordinates along one spatial axis."""
        j = np.arange(self.N)
        return _frozen_array(self.L * (2 * j - self.N) / self.N, float)

    @cached_property
    def times(self):
        i = np.arange(self.Nt)
        return _frozen_array(self.T * (2 * i - (self.Nt - 1)) / (self.Nt - 1), float)

    @cached_property
    def frequencies(self):
        """Lattice frequencies ``pi k / L`` along one axis, in FFT order."""
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        return _frozen_array(np.pi * k / self.L, float)

    @cached_property
    def frequency_signs(self):
        """``(-1)^k`` along one axis, the phase ``exp(i xi L)`` taken exactly."""
        k = np.rint(np.fft.fftfreq(self.N, d=1.0 / self.N)).astype(int)
        return _frozen_array(np.where(k % 2 == 0, 1.0, -1.0), float)

    @cached_property
    def box_phase(self):
        """``e^(i xi . L)`` on the spatial frequency lattice."""
        phase = np.ones(self.spatial_shape)
        for axis in range(self.n):
            phase = phase * self._axis_view(self.frequency_signs, axis, self.n)
        return _frozen_array(phase, float)

    def spatial_axes(self):
        """Open mesh of the spatial coordinates, one broadcastable array per axis."""
        return tuple(self._axis_view(self.coordinates, axis, self.n) for axis in range(self.n))

    def spacetime_axes(self):
        """Open mesh ``(t, x_1, ..., x_n)`` broadcastable to ``shape``."""
        t = self.times.reshape((self.Nt,) + (1,) * self.n)
        xs = tuple(
            self.coordinates.reshape((1,) + self._axis_shape(axis)) for axis in range(self.n)
        )
        return (t,) + xs

    def frequency_axes(self):
        """Open mesh of the lattice frequencies, one broadcastable array per axis."""
        return tuple(self._axis_view(self.frequencies, axis, self.n) for axis in range(self.n))

    @cached_property
    def frequency_magnitude(self):
        """``|xi|`` on the spatial frequency lattice (FFT order)."""
        squared = sum(axis ** 2 for axis in self.frequency_axes())
        return _frozen_array(np.broadcast_to(np.sqrt(squared), self.spatial_shape), float)

    def _axis_shape(self, axis):
        shape = [1] * self.n
        shape[axis] = self.N
        return tuple(shape)

    @staticmethod
    def _axis_view(values, axis, n):
        shape = [1] * n
        shape[axis] = values.size
        return values.reshape(shape)

    def index_to_coordinate(self, index):
        """Map a spatial multi-index to its node coordinates."""
        return tuple(float(self.coordinates[j]) for j in index)

    def coordinate_to_index(self, coordinate):
        """Map node coordinates back to the spatial multi-index."""
        index = tuple(int(round((x + self.L) / self.dx)) % self.N for x in coordinate)
        return index

    def time_to_index(self, t):
        return int(round((t + self.T) / self.dt))

    @property
    def time_zero_index(self):
        """
        Index of the ``t = 0`` node.

        Raises:
            GridError: when ``Nt`` is even and no node sits at ``t = 0``.
        """
        if self.Nt % 2 == 0:
            raise GridError(f'Nt = {self.Nt} has no node at t = 0; use an odd number of time points')
        return (self.Nt - 1) // 2

    def dyadic_rescale(self, m, gamma):
        """
        Grid on which ``w(2^m x, 2^(gamma m) t)`` has the same samples as ``w`` here.

        Args:
            m: integer dyadic exponent (negative values coarsen).
            gamma: time anisotropy.
        """
        scale = 2.0 ** m
        return make_grid(self.n, self.N, self.L / scale, self.Nt, self.T / scale ** gamma)

    def compatible_with(self, other):
        return (self.n, self.N, self.Nt) == (other.n, other.N, other.Nt) and \
            np.isclose(self.L, other.L) and np.isclose(self.T, other.T)


def make_grid(n, N, L, Nt, T):
    """
    Build a validated grid.

    Raises:
        GridError: if ``N`` is not a power of two of at least 8, ``Nt < 2``
            or a half-width is not positive.
    """
    if int(n) != n or n < 1:
        raise GridError(f'dimension must be a positive integer, got {n}')
    if int(N) != N or N < GRID_MIN_POINTS or (int(N) & (int(N) - 1)) != 0:
        raise GridError(f'N = {N} is not a power of two >= {GRID_MIN_POINTS}')
    if int(Nt) != Nt or Nt < GRID_MIN_TIME_POINTS:
        raise GridError(f'Nt = {Nt} must be an integer >= {GRID_MIN_TIME_POINTS}')
    if not (np.isfinite(L) and L > 0):
        raise GridError(f'L = {L} must be positive')
    if not (np.isfinite(T) and T > 0):
        raise GridError(f'T = {T} must be positive')
    grid = GridSpec(int(n), int(N), float(L), int(Nt), float(T))
    logger.debug('grid n=%d N=%d L=%g Nt=%d T=%g dx=%g dt=%g', grid.n, grid.N, grid.L, grid.Nt, grid.T, grid.dx, grid.dt)
    return grid


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples of a function of ``x`` on the spatial grid."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _frozen_array(self.values, complex)
        _check_samples(values, self.grid.spatial_shape, 'Field')
        object.__setattr__(self, 'values', values)

    def with_values(self, values):
        return Field(self.grid, values)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        return self.with_values(self.values - other.values)


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Complex samples of a function of ``(x, t)``, time-first."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _frozen_array(self.values, complex)
        _check_samples(values, self.grid.shape, 'SpaceTimeField')
        object.__setattr__(self, 'values', values)

    def at_time(self, index):
        return Field(self.grid, self.values[index])

    def with_values(self, values):
        return SpaceTimeField(self.grid, values)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        return self.with_values(self.values - other.values)


@dataclass(frozen=True, eq=False)
class Weight:
    """Nonnegative real samples on the space-time grid."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _real_samples(self.values, 'Weight')
        _check_samples(values, self.grid.shape, 'Weight')
        _check_nonnegative(values, 'Weight')
        object.__setattr__(self, 'values', values)

    def slice(self, index):
        return SpatialWeight(self.grid, self.values[index])

    @property
    def is_zero(self):
        return not np.any(self.values)


@dataclass(frozen=True, eq=False)
class SpatialWeight:
    """Nonnegative real samples on the spatial grid (one time slice)."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _real_samples(self.values, 'SpatialWeight')
        _check_samples(values, self.grid.spatial_shape, 'SpatialWeight')
        _check_nonnegative(values, 'SpatialWeight')
        object.__setattr__(self, 'values', values)


@dataclass(frozen=True, eq=False)
class Potential:
    """Real potential ``V(x, t)`` on the space-time grid."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _real_samples(self.values, 'Potential')
        _check_samples(values, self.grid.shape, 'Potential')
        object.__setattr__(self, 'values', values)

    def magnitude(self):
        """The weight ``|V|``."""
        return Weight(self.grid, np.abs(self.values))

    def scaled(self, factor):
        return Potential(self.grid, self.values * factor)


@dataclass(frozen=True)
class EstimateParams:
    """
    The exponents ``(n, gamma, s, p, alpha)`` of a weighted estimate.

    For the homogeneous smoothing estimates ``alpha = 2 s + gamma``; use
    :meth:`homogeneous` to build parameters tied that way.
    """

    n: int
    gamma: float
    s: float
    p: float
    alpha: float

    def __post_init__(self):
        if self.gamma < 1:
            raise ParameterRangeError(f'gamma = {self.gamma} must be >= 1', operation='EstimateParams')
        if self.p < 1:
            raise ParameterRangeError(f'p = {self.p} must be >= 1', operation='EstimateParams')

    @classmethod
    def homogeneous(cls, n, gamma, s, p):
        return cls(n=n, gamma=gamma, s=s, p=p, alpha=2 * s + gamma)

    @property
    def is_homogeneous(self):
        return self.alpha == 2 * self.s + self.gamma


def _real_samples(values, name):
    array = np.asarray(values)
    if np.iscomplexobj(array):
        if np.any(array.imag != 0):
            raise SampleError(f'{name} samples must be real')
        array = array.real
    return _frozen_array(array, float)


def _check_samples(values, shape, name):
    if values.shape != shape:
        raise SampleError(f'{name} expects shape {shape}, got {values.shape}')
    if not np.all(np.isfinite(values)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(values))[0])
        raise SampleError(f'{name} has a non-finite sample at index {bad}')


def _check_nonnegative(values, name):
    if np.any(values < 0):
        bad = tuple(int(i) for i in np.argwhere(values < 0)[0])
        raise SampleError(f'{name} has a negative sample {values[bad]:g} at index {bad}')


SAMPLE_KINDS = {
    'field': Field,
    'spacetime': SpaceTimeField,
    'weight': Weight,
    'spatial_weight': SpatialWeight,
    'potential': Potential,
}


def sample_function(grid, rule, kind='field'):
    """
    Sample a pointwise rule at the grid nodes.

    Spatial kinds call ``rule(x_1, ..., x_n)`` and space-time kinds call
    ``rule(t, x_1, ..., x_n)``; the arguments are broadcastable open meshes
    so vectorised numpy expressions work unchanged.

    Args:
        grid: the grid to sample on.
        rule: the pointwise rule.
        kind: one of ``field``, ``spacetime``, ``weight``, ``spatial_weight``
            or ``potential``.

    Raises:
        SampleError: on a non-finite sample, or a negative sample for a weight.
    """
    try:
        container = SAMPLE_KINDS[kind]
    except KeyError:
        raise SampleError(f'unknown sample kind {kind!r}')

    spatial = container in (Field, SpatialWeight)
    shape = grid.spatial_shape if spatial else grid.shape
    axes = grid.spatial_axes() if spatial else grid.spacetime_axes()
    with np.errstate(all='ignore'):
        raw = rule(*axes)
    values = np.broadcast_to(np.asarray(raw), shape)
    return container(grid, values)


def seeded_random_field(grid, seed, band=None):
    """
    Deterministic random field with Fourier support in a band.

    The coefficients are independent complex Gaussians on the selected
    lattice frequencies and zero elsewhere; the field is normalised to unit
    ``L^2`` norm.

    Args:
        grid: spatial grid.
        seed: integer seed; equal seeds give bitwise equal fields.
        band: ``None`` for every lattice frequency, a ``(low, high)`` pair
            selecting ``low <= |xi| <= high``, or a callable taking the
            frequency axes and returning a boolean mask.

    Raises:
        SampleError: if the band holds no lattice frequency.
    """
    if band is None:
        mask = np.ones(grid.spatial_shape, dtype=bool)
    elif callable(band):
        mask = np.broadcast_to(band(*grid.frequency_axes()), grid.spatial_shape)
    else:
        low, high = band
        magnitude = grid.frequency_magnitude
        mask = (magnitude >= low) & (magnitude <= high)

    if not np.any(mask):
        raise SampleError(f'frequency band {band!r} contains no lattice frequency', operation='seeded_random_field')

    rng = np.random.default_rng(seed)
    coefficients = rng.standard_normal(grid.spatial_shape) + 1j * rng.standard_normal(grid.spatial_shape)
    coefficients = np.where(mask, coefficients, 0.0)

    values = fft.ifftn(coefficients, norm='ortho')
    values /= np.sqrt(np.sum(np.abs(values) ** 2) * grid.cell_volume)
    return Field(grid, values)


def weight_model(grid, model, **parameters):
    """
    Model weights used across the experiments.

    Models and their parameters:
        ``constant``: ``value`` (default 1).
        ``gaussian``: ``width``, ``time_width`` (default infinite), ``floor``
            (added constant, default 0).
        ``power``: ``exponent`` a for ``|x|^-a``; the singular node takes the
            average of its axis neighbours.
        ``bracket``: ``delta`` for ``(1 + |x|^2)^(delta/2)``.
        ``cube``: ``center`` (tuple), ``half_side``, optional ``time_interval``.
        ``slab``: ``M``, the tilted set ``|t|, |x_1 - 2Mt|, |x_k| <= 1/(4n)``.
        ``cells``: ``seed``, ``cell`` (nodes per spatial cell side) and
            ``time_cell`` (nodes per time cell); i.i.d. uniform values on
            grid-aligned cells.

    Raises:
        SampleError: for an unknown model.
    """
    builder = _WEIGHT_MODELS.get(model)
    if builder is None:
        raise SampleError(f'unknown weight model {model!r}', operation='weight_model')
    values = builder(grid, **parameters)
    return Weight(grid, np.broadcast_to(values, grid.shape))


def _constant_weight(grid, value=1.0):
    return np.full(grid.shape, float(value))


def _gaussian_weight(grid, width=1.0, time_width=np.inf, floor=0.0):
    t, *xs = grid.spacetime_axes()
    radius_sq = sum(x ** 2 for x in xs)
    return np.exp(-radius_sq / (2 * width ** 2) - t ** 2 / (2 * time_width ** 2)) + floor


def _power_weight(grid, exponent):
    xs = grid.spatial_axes()
    radius = np.sqrt(sum(x ** 2 for x in xs)) * np.ones(grid.spatial_shape)
    singular = radius == 0
    with np.errstate(divide='ignore'):
        values = radius ** (-float(exponent))
    for index in zip(*np.nonzero(singular)):
        neighbours = []
        for axis in range(grid.n):
            for step in (-1, 1):
                neighbour = list(index)
                neighbour[axis] = (neighbour[axis] + step) % grid.N
                neighbours.append(values[tuple(neighbour)])
        values[index] = np.mean(neighbours)
    return values[np.newaxis]


def _bracket_weight(grid, delta):
    xs = grid.spatial_axes()
    return ((1 + sum(x ** 2 for x in xs)) ** (delta / 2.0))[np.newaxis]


def _cube_weight(grid, center=None, half_side=1.0, time_interval=None):
    t, *xs = grid.spacetime_axes()
    center = center or (0.0,) * grid.n
    inside = np.ones(grid.shape, dtype=bool)
    for x, c in zip(xs, center):
        inside = inside & (np.abs(x - c) <= half_side)
    if time_interval is not None:
        low, high = time_interval
        inside = inside & (t >= low) & (t <= high)
    return inside.astype(float)


def _slab_weight(grid, M):
    t, *xs = grid.spacetime_axes()
    side = 1.0 / (4 * grid.n)
    inside = (np.abs(t) <= side) & (np.abs(xs[0] - 2 * M * t) <= side)
    for x in xs[1:]:
        inside = inside & (np.abs(x) <= side)
    return inside.astype(float)


def _cell_weight(grid, seed, cell=1, time_cell=1):
    if grid.N % cell or (grid.Nt % time_cell):
        raise SampleError(f'cells of {cell} x {time_cell} nodes do not tile the grid', operation='weight_model')
    rng = np.random.default_rng(seed)
    coarse = rng.uniform(0.0, 1.0, (grid.Nt // time_cell,) + (grid.N // cell,) * grid.n)
    values = np.repeat(coarse, time_cell, axis=0)
    for axis in range(1, grid.n + 1):
        values = np.repeat(values, cell, axis=axis)
    return values


_WEIGHT_MODELS = {
    'constant': _constant_weight,
    'gaussian': _gaussian_weight,
    'power': _power_weight,
    'bracket': _bracket_weight,
    'cube': _cube_weight,
    'slab': _slab_weight,
    'cells': _cell_weight,
}

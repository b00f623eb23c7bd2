"""
Norm functionals on fields and weights.

Particularly Important Module:
    Quadrature conventions shared by every functional here:

    - spatial integrals are node sums times ``dx^n`` (each node stands for
      its cell);
    - time integrals integrate the piecewise-linear interpolant of the node
      values, i.e. the trapezoid rule on full windows and its exact partial
      version on windows that end between nodes.

    The Morrey-Campanato searches replace the continuum sup by a discrete
    one. Cubes are grid-aligned blocks of ``m = 2^j`` nodes (side
    ``r = m dx``) that never wrap around the box, so the weight is zero
    outside ``[-L, L)^n``. Time windows ``[t - l/2, t + l/2]`` are centred on
    time nodes and clipped to ``[-T, T]`` while the normalisation keeps the
    nominal ``r^n l``. Cube starts are strided by ``max(1, m/4)`` and window
    centres by ``max(1, l/(4 dt))``; ``refine=True`` scans every position.
    Under these rules the constant weight, the ``L^p`` identification, the
    Hölder inclusion and dyadic homogeneity hold exactly on the grid.
"""
import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .constants import CENTER_STRIDE_DIVISOR
from .core import Weight
from .exceptions import GridError, ParameterRangeError, WeightError
from .spectral import dft_forward

logger = logging.getLogger(__name__)


Witness = namedtuple('Witness', ['x', 't', 'r'])


@dataclass(frozen=True)
class MCResult:
    """Value of a Morrey-Campanato norm and the box that attains it."""

    value: float
    witness: Witness


def _require_same_grid(first, second, operation):
    if first.grid != second.grid:
        raise GridError(f'grids differ: {first.grid} vs {second.grid}', operation=operation)


def sobolev_norm(field, s):
    """``||f||_{H^s}`` by Parseval over the nonzero lattice frequencies."""
    coefficients = dft_forward(field).coefficients
    magnitude = field.grid.frequency_magnitude
    nonzero = magnitude > 0
    return float(np.sqrt(np.sum(magnitude[nonzero] ** (2 * s) * np.abs(coefficients[nonzero]) ** 2)))


def field_l2_norm(field):
    return float(np.sqrt(np.sum(np.abs(field.values) ** 2) * field.grid.cell_volume))


def time_trace_norm(series, grid):
    """``L^2_t`` norm over ``[-T, T]`` of samples taken at the time nodes."""
    return float(np.sqrt(trapezoid(np.abs(series) ** 2, dx=grid.dt)))


def _spacetime_integral(density, grid):
    spatial = density.reshape(grid.Nt, -1).sum(axis=1) * grid.cell_volume
    return float(trapezoid(spatial, dx=grid.dt))


def weighted_l2_norm(u, w):
    """
    ``||u||_{L^2(w)}``.

    Raises:
        GridError: if ``u`` and ``w`` live on different grids.
    """
    _require_same_grid(u, w, 'weighted_l2_norm')
    return float(np.sqrt(_spacetime_integral(np.abs(u.values) ** 2 * w.values, u.grid)))


def weighted_l2_norm_inverse(F, w):
    """
    ``||F||_{L^2(w^-1)}``; infinite when ``F`` is nonzero where ``w`` vanishes.
    """
    _require_same_grid(F, w, 'weighted_l2_norm_inverse')
    density = np.abs(F.values) ** 2
    if np.any((w.values == 0) & (density > 0)):
        return float('inf')
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(w.values > 0, density / np.where(w.values > 0, w.values, 1.0), 0.0)
    return float(np.sqrt(_spacetime_integral(ratio, F.grid)))


def lp_norm(w, p):
    """Space-time ``L^p`` norm with the lab's quadrature."""
    return _spacetime_integral(np.asarray(w.values, dtype=float) ** p, w.grid) ** (1.0 / p)


def spatial_lp_norm(w_slice, p):
    return float((np.sum(w_slice.values ** p) * w_slice.grid.cell_volume) ** (1.0 / p))


def _dyadic_sizes(N):
    sizes = []
    m = 1
    while m <= N:
        sizes.append(m)
        m *= 2
    return sizes


def _strided(length, size, stride):
    last = length - size
    return np.unique(np.concatenate([np.arange(0, last + 1, stride), [last]]))


def _cube_starts(N, m, refine):
    stride = 1 if refine else max(1, m // CENTER_STRIDE_DIVISOR)
    return _strided(N, m, stride)


def _cube_sums(values, n, m, starts):
    """Sums over non-wrapping cubes of ``m`` nodes per axis on the trailing ``n`` axes."""
    sums = values
    for axis in range(sums.ndim - n, sums.ndim):
        prefix = np.cumsum(sums, axis=axis)
        pad = [(0, 0)] * sums.ndim
        pad[axis] = (1, 0)
        prefix = np.pad(prefix, pad)
        sums = np.take(prefix, starts + m, axis=axis) - np.take(prefix, starts, axis=axis)
    return sums


def _cube_center(grid, starts, m, position):
    return tuple(float(grid.coordinates[starts[i]] + (m - 1) * grid.dx / 2) for i in position)


def _window_centers(grid, length, refine):
    stride = 1 if refine else max(1, int(length / (CENTER_STRIDE_DIVISOR * grid.dt)))
    centers = np.arange(0, grid.Nt, stride)
    extras = [grid.Nt - 1]
    if grid.Nt % 2:
        extras.append((grid.Nt - 1) // 2)
    return np.unique(np.concatenate([centers, extras]))


class _TimeIntegrator:
    """Exact integrals of the piecewise-linear interpolant of node series along axis 0."""

    def __init__(self, series, grid):
        self.series = series
        self.grid = grid
        self.cumulative = cumulative_trapezoid(series, dx=grid.dt, axis=0, initial=0)

    def antiderivative(self, tau):
        grid = self.grid
        position = (np.clip(tau, -grid.T, grid.T) + grid.T) / grid.dt
        index = np.clip(np.floor(position).astype(int), 0, grid.Nt - 2)
        theta = (position - index).reshape((-1,) + (1,) * (self.series.ndim - 1))
        left = self.series[index]
        right = self.series[index + 1]
        return self.cumulative[index] + grid.dt * (theta * left + theta ** 2 / 2 * (right - left))

    def windows(self, centers, length):
        t = self.grid.times[centers]
        integral = self.antiderivative(t + length / 2) - self.antiderivative(t - length / 2)
        return np.maximum(integral, 0.0)


def _check_mc_parameters(alpha, p, gamma, operation):
    if not alpha > 0:
        raise ParameterRangeError(f'alpha = {alpha} must be positive', operation=operation)
    if not p >= 1:
        raise ParameterRangeError(f'p = {p} must be >= 1', operation=operation)
    if gamma is not None and not gamma >= 1:
        raise ParameterRangeError(f'gamma = {gamma} must be >= 1', operation=operation)


def _scan_boxes(w, p, lengths_for, scale, refine):
    """
    Shared sup search over cubes and time windows.

    ``lengths_for(r)`` lists the window lengths paired with radius ``r`` and
    ``scale(r, l)`` gives the prefactor ``r^a l^b`` of the normalised average.
    """
    grid = w.grid
    powered = np.asarray(w.values, dtype=float) ** p
    best = MCResult(0.0, Witness(None, None, None))
    for m in _dyadic_sizes(grid.N):
        r = m * grid.dx
        starts = _cube_starts(grid.N, m, refine)
        integrator = _TimeIntegrator(_cube_sums(powered, grid.n, m, starts) * grid.cell_volume, grid)
        for length in lengths_for(r):
            centers = _window_centers(grid, length, refine)
            averages = integrator.windows(centers, length) / (r ** grid.n * length)
            values = scale(r, length) * averages ** (1.0 / p)
            position = np.unravel_index(np.argmax(values), values.shape)
            value = float(values[position])
            if value > best.value:
                x = _cube_center(grid, starts, m, position[1:])
                best = MCResult(value, Witness(x, float(grid.times[centers[position[0]]]), r))
    return best


def mc_norm(w, alpha, p, gamma, refine=False):
    """
    Discrete ``||w||`` in the anisotropic Morrey-Campanato class.

    ``sup_{x,t,r} r^alpha (r^-(n+gamma) int_{Q(x,r) x I(t,r^gamma)} w^p)^(1/p)``
    over dyadic radii ``r = dx 2^j`` up to the box size.

    Args:
        w: the weight.
        alpha: scale exponent, positive.
        p: integrability exponent, at least 1.
        gamma: time anisotropy, at least 1.
        refine: scan every cube start and window centre.

    Returns:
        MCResult with the value and the ``(x, t, r)`` witness.

    Raises:
        ParameterRangeError: for degenerate exponents.
    """
    _check_mc_parameters(alpha, p, gamma, 'mc_norm')
    result = _scan_boxes(
        w, p,
        lengths_for=lambda r: (r ** gamma,),
        scale=lambda r, length: r ** alpha,
        refine=refine,
    )
    logger.debug('mc_norm alpha=%g p=%g gamma=%g value=%.6g witness=%s', alpha, p, gamma, result.value, result.witness)
    return result


def _spatial_sup(powered, grid, alpha, p, refine):
    """Per-slice spatial sup; ``powered`` has leading batch axes and ``n`` spatial axes."""
    batch = powered.shape[:powered.ndim - grid.n]
    best = np.zeros(batch)
    for m in _dyadic_sizes(grid.N):
        r = m * grid.dx
        starts = _cube_starts(grid.N, m, refine)
        sums = _cube_sums(powered, grid.n, m, starts) * grid.cell_volume
        averages = np.maximum(sums, 0.0) / r ** grid.n
        values = r ** alpha * averages ** (1.0 / p)
        best = np.maximum(best, values.reshape(batch + (-1,)).max(axis=-1))
    return best


def mc_norm_spatial(w_slice, alpha, p, refine=False):
    """Classical ``sup_{x,r} r^alpha (r^-n int_Q w^p)^(1/p)`` of a spatial weight."""
    _check_mc_parameters(alpha, p, None, 'mc_norm_spatial')
    powered = np.asarray(w_slice.values, dtype=float) ** p
    return float(_spatial_sup(powered, w_slice.grid, alpha, p, refine))


def mixed_mc_norm(w, alpha, r, refine=False):
    """``||w||_{L^1_t L^{alpha,r}}``: trapezoid in time of the slice norms."""
    if not r > 1:
        raise ParameterRangeError(f'r = {r} must exceed 1', operation='mixed_mc_norm')
    _check_mc_parameters(alpha, r, None, 'mixed_mc_norm')
    powered = np.asarray(w.values, dtype=float) ** r
    slices = _spatial_sup(powered, w.grid, alpha, r, refine)
    return float(trapezoid(slices, dx=w.grid.dt))


def biparameter_lengths(grid, gamma=None):
    """
    Window lengths scanned by :func:`mc_norm_biparameter`.

    Dyadic fractions ``2T / 2^i`` down to ``dt``, plus ``r^gamma`` for every
    scanned radius when ``gamma`` is given.
    """
    lengths = []
    length = 2 * grid.T
    while length >= grid.dt:
        lengths.append(length)
        length /= 2
    if gamma is not None:
        lengths.extend((m * grid.dx) ** gamma for m in _dyadic_sizes(grid.N))
    return tuple(sorted(set(lengths)))


def mc_norm_biparameter(w, alpha, beta, p, gamma=None, refine=False):
    """
    ``sup r^alpha l^beta (r^-n l^-1 int_{Q(x,r) x I(t,l)} w^p)^(1/p)`` over independent ``r``, ``l``.

    Passing ``gamma`` adds the lengths ``l = r^gamma`` to the scan, which
    makes the embedding into the one-parameter class hold with constant 1.

    Raises:
        ParameterRangeError: unless ``0 < alpha <= n/p`` and ``0 < beta <= 1/p``.
    """
    n = w.grid.n
    if not (0 < alpha <= n / p) or not (0 < beta <= 1.0 / p) or p < 1:
        raise ParameterRangeError(
            f'need 0 < alpha <= n/p and 0 < beta <= 1/p, got alpha={alpha}, beta={beta}, p={p}',
            operation='mc_norm_biparameter',
        )
    lengths = biparameter_lengths(w.grid, gamma)
    result = _scan_boxes(
        w, p,
        lengths_for=lambda r: lengths,
        scale=lambda r, length: r ** alpha * length ** beta,
        refine=refine,
    )
    return result.value


def _centered_sums(values, n, h):
    """Sums over centred cubes of ``2h+1`` nodes, zero outside the box."""
    sums = values
    for axis in range(values.ndim - n, values.ndim):
        size = sums.shape[axis]
        prefix = np.cumsum(sums, axis=axis)
        pad = [(0, 0)] * sums.ndim
        pad[axis] = (1, 0)
        prefix = np.pad(prefix, pad)
        index = np.arange(size)
        upper = np.minimum(index + h + 1, size)
        lower = np.maximum(index - h, 0)
        sums = np.take(prefix, upper, axis=axis) - np.take(prefix, lower, axis=axis)
    return sums


def maximal_function(w, q):
    """
    Spatial maximal function of each time slice.

    ``w_*(x, t) = sup_h ((2h+1)^-n sum_{|y - x|_inf <= h dx} w(y, t)^q)^(1/q)``
    over centred cubes of every odd node count, with ``w`` extended by zero
    outside the box. The ``h = 0`` cube returns ``w`` itself, so
    ``w <= w_*`` holds exactly.

    Raises:
        ParameterRangeError: unless ``q > 1``.
    """
    if not q > 1:
        raise ParameterRangeError(f'q = {q} must exceed 1', operation='maximal_function')
    grid = w.grid
    powered = np.asarray(w.values, dtype=float) ** q
    result = np.array(w.values, dtype=float)
    for h in range(1, grid.N):
        averages = _centered_sums(powered, grid.n, h) / (2 * h + 1) ** grid.n
        np.maximum(result, np.maximum(averages, 0.0) ** (1.0 / q), out=result)
    return Weight(grid, result)


def _dyadic_blocks(values, n, m):
    """Reshape so each aligned cube of ``m`` nodes per axis is one row."""
    N = values.shape[0]
    blocks = values.reshape(sum(((N // m, m) for _ in range(n)), ()))
    outer = tuple(range(0, 2 * n, 2))
    inner = tuple(range(1, 2 * n, 2))
    return blocks.transpose(outer + inner).reshape((N // m,) * n + (-1,))


def a2_constant(w_slice):
    """
    ``sup_Q (avg_Q w)(avg_Q w^-1)`` over grid-aligned dyadic cubes.

    Cubes on which the slice is constant contribute exactly 1, and the
    result is never below 1.

    Raises:
        WeightError: if the slice vanishes at some node.
    """
    values = np.asarray(w_slice.values, dtype=float)
    zeros = np.argwhere(values <= 0)
    if zeros.size:
        index = tuple(int(i) for i in zeros[0])
        coordinate = w_slice.grid.index_to_coordinate(index)
        raise WeightError(f'weight vanishes at node {index} (x = {coordinate})', operation='a2_constant')
    n = w_slice.grid.n
    best = 1.0
    for m in _dyadic_sizes(w_slice.grid.N):
        blocks = _dyadic_blocks(values, n, m)
        product = blocks.mean(axis=-1) * (1.0 / blocks).mean(axis=-1)
        flat = blocks.max(axis=-1) == blocks.min(axis=-1)
        product = np.where(flat, 1.0, product)
        best = max(best, float(product.max()))
    return best


def a2_profile(w):
    """A2 constants of every time slice; NaN for slices that vanish identically."""
    return np.array([
        a2_constant(w.slice(i)) if np.any(w.values[i]) else np.nan
        for i in range(w.grid.Nt)
    ])


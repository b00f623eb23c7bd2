"""
Fourier-side operators on the periodic grid.

Particularly Important Module:
    The discrete Fourier transform is normalised so that Parseval is exact,

        sum_j |f(x_j)|^2 dx^n = sum_k |c_k|^2,

    with ``c_k = dx^(n/2) e^(i xi_k . L) DFT_ortho(f)_k`` and inversion
    ``f(x) = (2L)^(-n/2) sum_k c_k e^(i xi_k . x)``. The phase
    ``e^(i xi_k . L) = (-1)^(k_1 + ... + k_n)`` accounts for the box starting
    at ``-L``. Every operator below is a Fourier multiplier, so it is applied
    with plain FFTs: the normalisation and phase cancel.

    Propagator sign conventions:
        ``propagate``            e^(-it|xi|^gamma)
        ``half_wave_propagate``  e^(+it|xi|^(gamma/2))
        ``airy_propagate``       e^(-t(i xi)^(2k+1)) = e^(-it(-1)^k xi^(2k+1)),
                                 so k = 1 carries the phase e^(it xi^3)
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .core import Field, SpaceTimeField
from .exceptions import SpectralError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients of a Field, indexed in FFT order."""

    grid: object
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=complex, copy=True)
        if coefficients.shape != self.grid.spatial_shape:
            raise SpectralError(
                f'Spectrum expects shape {self.grid.spatial_shape}, got {coefficients.shape}',
                operation='dft_inverse',
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)


def _spatial_axes(values, n):
    return tuple(range(values.ndim - n, values.ndim))


def spatial_fft(values, n):
    """Plain FFT over the trailing ``n`` (spatial) axes."""
    return fft.fftn(values, axes=_spatial_axes(values, n))


def spatial_ifft(values, n):
    return fft.ifftn(values, axes=_spatial_axes(values, n))


def dft_forward(field):
    """
    Unitary forward transform of a Field.

    Raises:
        SpectralError: if the samples do not match the grid.
    """
    grid = field.grid
    if field.values.shape != grid.spatial_shape:
        raise SpectralError(f'field shape {field.values.shape} does not match the grid', operation='dft_forward')
    coefficients = grid.cell_volume ** 0.5 * grid.box_phase * fft.fftn(field.values, norm='ortho')
    return Spectrum(grid, coefficients)


def dft_inverse(spectrum):
    """Inverse of :func:`dft_forward`."""
    grid = spectrum.grid
    values = fft.ifftn(spectrum.coefficients * grid.box_phase, norm='ortho') / grid.cell_volume ** 0.5
    return Field(grid, values)


def _multiplier_values(grid, multiplier):
    if callable(multiplier):
        values = multiplier(*grid.frequency_axes())
    else:
        values = multiplier
    values = np.broadcast_to(np.asarray(values), grid.spatial_shape)
    if not np.all(np.isfinite(values)):
        raise SpectralError('multiplier has non-finite values on the frequency lattice', operation='apply_multiplier')
    return values


def apply_multiplier(field, multiplier):
    """
    Apply a Fourier multiplier ``m(xi)``.

    Args:
        field: a Field, or a SpaceTimeField (the multiplier acts on each time slice).
        multiplier: callable of the frequency axes ``(xi_1, ..., xi_n)`` or an
            array broadcastable to the spatial shape, in FFT order.

    Raises:
        SpectralError: if the multiplier is not finite everywhere.
    """
    grid = field.grid
    values = _multiplier_values(grid, multiplier)
    output = spatial_ifft(values * spatial_fft(field.values, grid.n), grid.n)
    return field.with_values(output)


def schrodinger_symbol(grid, gamma):
    """``|xi|^gamma``, the symbol of ``(-Delta)^(gamma/2)``."""
    return grid.frequency_magnitude ** gamma


def wave_symbol(grid, gamma):
    """``|xi|^(gamma/2)``, the symbol of ``sqrt((-Delta)^(gamma/2))``."""
    return grid.frequency_magnitude ** (gamma / 2.0)


def kdv_symbol(grid, k):
    """``(-1)^k xi^(2k+1)``, so that ``e^(-t d_x^(2k+1))`` has multiplier ``e^(-it symbol)``."""
    _check_kdv(grid, k)
    return (-1.0) ** k * grid.frequencies ** (2 * k + 1)


def _check_gamma(gamma, operation):
    if not gamma >= 1:
        raise SpectralError(f'gamma = {gamma} must be >= 1', operation=operation)


def _check_kdv(grid, k):
    if grid.n != 1:
        raise SpectralError(f'the Airy propagator is one-dimensional, got n = {grid.n}', operation='airy_propagate')
    if int(k) != k or k < 1:
        raise SpectralError(f'k = {k} must be an integer >= 1', operation='airy_propagate')


def propagate(field, t, gamma):
    """``e^(-it(-Delta)^(gamma/2)) f``."""
    _check_gamma(gamma, 'propagate')
    return apply_multiplier(field, np.exp(-1j * t * schrodinger_symbol(field.grid, gamma)))


def half_wave_propagate(field, t, gamma):
    """``e^(it sqrt((-Delta)^(gamma/2))) f``."""
    _check_gamma(gamma, 'half_wave_propagate')
    return apply_multiplier(field, np.exp(1j * t * wave_symbol(field.grid, gamma)))


def airy_propagate(field, t, k):
    """``e^(-t d_x^(2k+1)) f`` on the line."""
    return apply_multiplier(field, np.exp(-1j * t * kdv_symbol(field.grid, k)))


def fractional_derivative(field, s):
    """
    ``|nabla|^s f`` with the zero mode sent to 0 for every ``s``.

    Works on Field and SpaceTimeField alike.
    """
    magnitude = field.grid.frequency_magnitude
    with np.errstate(divide='ignore'):
        symbol = np.where(magnitude > 0, magnitude ** float(s), 0.0)
    return apply_multiplier(field, symbol)


def propagate_orbit(field, symbol, sign=-1):
    """
    Evaluate ``e^(sign i t symbol) f`` at every time node of the grid.

    Args:
        field: initial data.
        symbol: real array on the frequency lattice (FFT order).
        sign: -1 or +1.

    Returns:
        SpaceTimeField with one propagated slice per time node.
    """
    grid = field.grid
    symbol = _multiplier_values(grid, symbol)
    times = grid.times.reshape((grid.Nt,) + (1,) * grid.n)
    coefficients = spatial_fft(field.values, grid.n)
    orbit = spatial_ifft(np.exp(sign * 1j * times * symbol) * coefficients, grid.n)
    return SpaceTimeField(grid, orbit)


def _eta(t):
    t = np.asarray(t, dtype=float)
    inside = (t > 0.5) & (t < 2.0)
    safe = np.where(inside, t, 1.0)
    return np.where(inside, np.exp(-1.0 / ((safe - 0.5) * (2.0 - safe))), 0.0)


class DyadicCutoff:
    """
    The smooth cutoff ``phi`` supported in ``(1/2, 2)`` with ``sum_k phi(2^k t) = 1``.

    ``phi = eta / sum_j eta(2^j .)`` where ``eta(t) = exp(-1/((t - 1/2)(2 - t)))``
    on ``(1/2, 2)``. The normalising sum is dyadically invariant and has at
    most two nonzero terms, found from ``m = floor(-log2 t)``.
    """

    shifts = (-1, 0, 1, 2)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        positive = t > 0
        tp = t[positive]
        base = np.floor(-np.log2(tp)).astype(int)
        normaliser = sum(_eta(np.ldexp(tp, base + shift)) for shift in self.shifts)
        out[positive] = _eta(tp) / normaliser
        return out if out.ndim else float(out)

    def partition_sum(self, t, k_range):
        """``sum_k phi(2^k t)`` over the given integer range."""
        t = np.asarray(t, dtype=float)
        return sum(self(np.ldexp(t, k)) for k in k_range)

    def multiplier(self, grid, k):
        """``phi(2^-k |xi|)`` on the frequency lattice."""
        return self(np.ldexp(grid.frequency_magnitude, -int(k)))


CUTOFF = DyadicCutoff()


def cutoff_phi(t):
    """Value of the dyadic cutoff ``phi`` (scalar or array)."""
    return CUTOFF(t)


def littlewood_paley_project(field, k):
    """``P_k f``, the multiplier ``phi(2^-k |xi|)``."""
    return apply_multiplier(field, CUTOFF.multiplier(field.grid, k))

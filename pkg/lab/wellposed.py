"""
Duhamel quadrature and Picard solvers for the linear problems with a potential.

Particularly Important Module:
    Three problems are solved through their integral equations, with
    ``theta`` the phase symbol and ``rho = |xi|^(gamma/2)``:

        Schrödinger   i u_t - (-Delta)^(gamma/2) u + V u = F
                      u = e^(-it theta) f - i int_0^t e^(-i(t-s) theta) (F - V u) ds
        wave          u_tt + rho^2 u + V u = F
                      u = cos(t rho) f + sin(t rho)/rho g + int_0^t sin((t-s) rho)/rho (F - V u) ds
        KdV-type      u_t + d_x^(2k+1) u + V u = F
                      u = e^(-t d_x^(2k+1)) f + int_0^t e^(-(t-s) d_x^(2k+1)) (F - V u) ds

    Every Duhamel integral starts at ``t = 0``, so the grids need an odd
    number of time nodes. The running integral uses the group law
    ``e^(-i(t-s) theta) = e^(-it theta) e^(is theta)`` and one cumulative
    trapezoid, so a solve costs ``O(Nt)`` multiplier applications.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .constants import (
    CONTRACTION_TARGET,
    DIVERGENCE_FACTOR,
    DIVERGENCE_WINDOW,
    MESSAGES,
    PICARD_MAX_ITER,
    PICARD_TOL,
    RESCALE_MAX_HALVINGS,
)
from .core import Field, SpaceTimeField
from .exceptions import GridError, ParameterRangeError, PicardDivergenceError
from .norms import field_l2_norm, mc_norm, sobolev_norm, weighted_l2_norm, weighted_l2_norm_inverse
from .spectral import (
    dft_forward,
    kdv_symbol,
    propagate_orbit,
    schrodinger_symbol,
    spatial_fft,
    spatial_ifft,
    wave_symbol,
)

logger = logging.getLogger(__name__)

KINDS = ('schrodinger', 'wave', 'kdv')


def _time_column(grid):
    return grid.times.reshape((grid.Nt,) + (1,) * grid.n)


def duhamel_transform(F, symbol, sign=-1, amplitude=None):
    """
    ``D(t) = int_0^t a(xi) e^(sign i (t-s) symbol) F(s) ds`` by the trapezoid rule.

    Args:
        F: forcing on a grid with a node at ``t = 0``.
        symbol: real phase on the frequency lattice.
        sign: -1 or +1.
        amplitude: optional multiplier ``a(xi)``.

    Raises:
        GridError: if the grid has no ``t = 0`` node.
    """
    grid = F.grid
    origin = grid.time_zero_index
    phase = np.broadcast_to(np.asarray(symbol, dtype=float), grid.spatial_shape) * _time_column(grid)

    integrand = np.exp(-sign * 1j * phase) * spatial_fft(F.values, grid.n)
    running = cumulative_trapezoid(integrand, dx=grid.dt, axis=0, initial=0)
    running = running - running[origin]

    spectrum = np.exp(sign * 1j * phase) * running
    if amplitude is not None:
        spectrum = spectrum * amplitude
    return SpaceTimeField(grid, spatial_ifft(spectrum, grid.n))


def inverse_wave_symbol(grid, gamma):
    """``1/rho`` off the zero mode, 0 on it."""
    rho = wave_symbol(grid, gamma)
    positive = rho > 0
    return np.where(positive, 1.0 / np.where(positive, rho, 1.0), 0.0)


def _kdv_order(gamma, operation):
    k = (gamma - 1) / 2
    if k != int(k) or k < 1:
        raise ParameterRangeError(f'KdV order needs gamma = 2k + 1 with integer k >= 1, got {gamma}', operation=operation)
    return int(k)


def _check_kind(kind, gamma, operation):
    if kind not in KINDS:
        raise ParameterRangeError(f'unknown kind {kind!r}; expected one of {KINDS}', operation=operation)
    if kind == 'schrodinger' and not gamma >= 1:
        raise ParameterRangeError(f'gamma = {gamma} must be >= 1', operation=operation)
    if kind == 'wave' and not gamma >= 2:
        raise ParameterRangeError(f'gamma = {gamma} must be >= 2 for the wave kind', operation=operation)
    if kind == 'kdv':
        _kdv_order(gamma, operation)


def duhamel_integral(F, gamma, kind='schrodinger'):
    """
    The kernel integral ``int_0^t K(t - s) F(s) ds`` of ``kind``, evaluated at every time node.

    Kernels: ``e^(-i(t-s)|xi|^gamma)`` (schrodinger), ``sin((t-s) rho)/rho``
    with the zero mode sent to 0 (wave), ``e^(-(t-s) d_x^(2k+1))`` with
    ``gamma = 2k + 1`` (kdv). The output vanishes at ``t = 0``.

    Raises:
        ParameterRangeError: if ``gamma`` is out of range for ``kind``.
    """
    _check_kind(kind, gamma, 'duhamel_integral')
    grid = F.grid
    if kind == 'schrodinger':
        return duhamel_transform(F, schrodinger_symbol(grid, gamma), sign=-1)
    if kind == 'kdv':
        return duhamel_transform(F, kdv_symbol(grid, _kdv_order(gamma, 'duhamel_integral')), sign=-1)

    rho = wave_symbol(grid, gamma)
    amplitude = inverse_wave_symbol(grid, gamma)
    forward = duhamel_transform(F, rho, sign=1, amplitude=amplitude)
    backward = duhamel_transform(F, rho, sign=-1, amplitude=amplitude)
    return (forward - backward) * (1 / 2j)


def _zero_field(grid):
    return Field(grid, np.zeros(grid.spatial_shape))


def _wave_multipliers(grid, gamma):
    phase = wave_symbol(grid, gamma) * _time_column(grid)
    return np.cos(phase), np.sin(phase)


def homogeneous_wave(f, g, gamma):
    """
    ``cos(t rho) f + sin(t rho)/rho g`` at every time node, ``rho = |xi|^(gamma/2)``.

    The zero mode of ``g`` is dropped.

    Raises:
        ParameterRangeError: if ``gamma < 2``.
    """
    if not gamma >= 2:
        raise ParameterRangeError(f'gamma = {gamma} must be >= 2', operation='homogeneous_wave')
    grid = f.grid
    g = g if g is not None else _zero_field(grid)
    cosine, sine = _wave_multipliers(grid, gamma)
    velocity = inverse_wave_symbol(grid, gamma) * spatial_fft(g.values, grid.n)
    spectrum = cosine * spatial_fft(f.values, grid.n) + sine * velocity
    return SpaceTimeField(grid, spatial_ifft(spectrum, grid.n))


def wave_energy(f, g, gamma, t):
    """
    ``||d_t u(t)||^2 + ||rho u(t)||^2`` for the homogeneous wave with data ``(f, g)``.

    The time derivative is taken through the exact multiplier
    ``-rho sin(t rho) f^ + cos(t rho) g^``.
    """
    grid = f.grid
    rho = wave_symbol(grid, gamma)
    f_hat = dft_forward(f).coefficients
    g_hat = np.where(rho > 0, dft_forward(g).coefficients, 0.0) if g is not None else np.zeros(grid.spatial_shape)
    cosine, sine = np.cos(t * rho), np.sin(t * rho)
    u_hat = cosine * f_hat + sine * inverse_wave_symbol(grid, gamma) * g_hat
    du_hat = -rho * sine * f_hat + cosine * g_hat
    return float(np.sum(np.abs(du_hat) ** 2) + np.sum(np.abs(rho * u_hat) ** 2))


@dataclass
class PicardReport:
    """
    Diagnostics of one Picard solve.

    Attributes:
        iterations: number of updates performed.
        residual: defect of the integral equation in ``L^2(|V|)``.
        contraction_estimates: ratios ``||Phi(u_{k+1} - u_k)|| / ||u_{k+1} - u_k||``.
        converged: whether the update fell below the tolerance.
        scale: factor the potential was multiplied by before solving.
    """

    iterations: int
    residual: float
    contraction_estimates: list = field(default_factory=list)
    converged: bool = False
    scale: float = 1.0

    @property
    def max_contraction(self):
        return max(self.contraction_estimates, default=0.0)


class IntegralEquation:
    """
    ``u = base + Phi(u)`` for one problem kind.

    ``base`` is the free evolution of the data plus the Duhamel term of the
    forcing and ``Phi(u)`` is the Duhamel term of ``-V u``, both with the
    kind's coefficient (``-i`` for Schrödinger, ``1`` otherwise).
    """

    def __init__(self, f, V, F=None, gamma=2, kind='schrodinger', g=None):
        _check_kind(kind, gamma, 'picard_solve')
        grid = V.grid
        for name, item in (('f', f), ('F', F), ('g', g)):
            if item is not None and item.grid != grid:
                raise GridError(f'{name} lives on a different grid than V', operation='picard_solve')
        self.grid = grid
        self.V = V
        self.gamma = gamma
        self.kind = kind
        self.coefficient = -1j if kind == 'schrodinger' else 1.0
        self.weight = V.magnitude()

        homogeneous = self._homogeneous(f, g)
        if F is not None:
            homogeneous = homogeneous + self.duhamel(F) * self.coefficient
        self.base = homogeneous

    def _homogeneous(self, f, g):
        if self.kind == 'schrodinger':
            return propagate_orbit(f, schrodinger_symbol(self.grid, self.gamma), sign=-1)
        if self.kind == 'kdv':
            return propagate_orbit(f, kdv_symbol(self.grid, _kdv_order(self.gamma, 'picard_solve')), sign=-1)
        return homogeneous_wave(f, g, self.gamma)

    def duhamel(self, F):
        return duhamel_integral(F, self.gamma, kind=self.kind)

    def perturbation(self, u):
        """``Phi(u)``."""
        potential_term = u.with_values(self.V.values * u.values)
        return self.duhamel(potential_term) * (-self.coefficient)

    def norm(self, u):
        return weighted_l2_norm(u, self.weight)

    def defect(self, u):
        return self.norm(u - (self.base + self.perturbation(u)))


def picard_solve(f, V, F=None, gamma=2, kind='schrodinger', g=None, tol=PICARD_TOL, max_iter=PICARD_MAX_ITER):
    """
    Solve the integral equation of ``kind`` by successive substitution.

    Args:
        f: initial data (position for the wave kind).
        V: real potential.
        F: forcing, or None.
        gamma: dispersion order (``2k + 1`` for kdv).
        kind: ``schrodinger``, ``wave`` or ``kdv``.
        g: initial velocity for the wave kind.
        tol: stop once the update is below ``tol`` in ``L^2(|V|)``.
        max_iter: iteration cap; reaching it returns ``converged=False``.

    Returns:
        ``(u, PicardReport)``.

    Raises:
        PicardDivergenceError: when the iterates grow by more than
            ``DIVERGENCE_FACTOR`` over ``DIVERGENCE_WINDOW`` iterations or
            stop being finite.
    """
    equation = IntegralEquation(f, V, F=F, gamma=gamma, kind=kind, g=g)
    u = equation.base
    norms = [equation.norm(u)]
    changes = []
    estimates = []
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        update = equation.base + equation.perturbation(u)
        change = equation.norm(update - u)
        norms.append(equation.norm(update))
        if not (math.isfinite(change) and math.isfinite(norms[-1])):
            raise PicardDivergenceError(f'iterate {iterations} is not finite', contraction_estimates=estimates)
        if changes and changes[-1] > 0:
            estimates.append(change / changes[-1])
        changes.append(change)
        logger.debug('picard %s iteration %d change=%.3e', kind, iterations, change)

        if len(norms) > DIVERGENCE_WINDOW and norms[-1] > DIVERGENCE_FACTOR * norms[-1 - DIVERGENCE_WINDOW] > 0:
            raise PicardDivergenceError(
                f'iterate norm grew from {norms[-1 - DIVERGENCE_WINDOW]:.3e} to {norms[-1]:.3e} '
                f'over {DIVERGENCE_WINDOW} iterations; the potential is too large',
                contraction_estimates=estimates,
            )
        u = update
        if change < tol:
            converged = True
            break

    residual = equation.defect(u)
    if converged:
        logger.info('picard %s converged in %d iterations, residual %.3e', kind, iterations, residual)
    else:
        logger.warning(MESSAGES['not_converged'].format(iterations=iterations))
    return u, PicardReport(iterations=iterations, residual=residual, contraction_estimates=estimates, converged=converged)


def first_contraction(f, V, F=None, gamma=2, kind='schrodinger', g=None):
    """Measured ``||Phi(d)|| / ||d||`` on the first update ``d = Phi(base)``."""
    equation = IntegralEquation(f, V, F=F, gamma=gamma, kind=kind, g=g)
    first = equation.perturbation(equation.base)
    size = equation.norm(first)
    if size == 0:
        return 0.0
    return equation.norm(equation.perturbation(first)) / size


def potential_rescale(f, V, F=None, gamma=2, kind='schrodinger', g=None,
                      target=CONTRACTION_TARGET, max_halvings=RESCALE_MAX_HALVINGS):
    """
    Halve ``V`` until the first-iteration contraction is below ``target``.

    Returns:
        ``(scale, rescaled V, contraction)``.

    Raises:
        ParameterRangeError: if ``max_halvings`` halvings do not suffice.
    """
    scale = 1.0
    current = V
    for _ in range(max_halvings + 1):
        contraction = first_contraction(f, current, F=F, gamma=gamma, kind=kind, g=g)
        if contraction < target:
            if scale != 1.0:
                logger.info('potential rescaled by %g, contraction %.3f', scale, contraction)
            return scale, current, contraction
        scale /= 2
        current = V.scaled(scale)
    raise ParameterRangeError(
        f'contraction stays above {target} after {max_halvings} halvings of the potential',
        operation='potential_rescale',
    )


@dataclass(frozen=True)
class InequalityReport:
    """
    Both sides of the weighted bound and the uniform-in-time bound, with ``C = 1``.

    ``lhs / rhs`` is therefore the measured constant.
    """

    lhs1: float
    rhs1: float
    lhs2: float
    rhs2: float

    @staticmethod
    def _ratio(lhs, rhs):
        if rhs == 0:
            return 0.0 if lhs == 0 else math.inf
        return lhs / rhs

    @property
    def ratio1(self):
        return self._ratio(self.lhs1, self.rhs1)

    @property
    def ratio2(self):
        return self._ratio(self.lhs2, self.rhs2)


def _time_derivative(u):
    return u.with_values(np.gradient(u.values, u.grid.dt, axis=0, edge_order=2))


def wellposedness_inequalities(u, f, V, p, gamma=2, F=None, kind='schrodinger', g=None, refine=False):
    """
    Report both sides of the well-posedness bounds for a solution ``u``.

    Schrödinger and KdV kinds (class exponent and anisotropy ``gamma``)::

        ||u||_{L^2(|V|)} <= ||V||^(1/2) ||f||_2 + ||V|| ||F||_{L^2(|V|^-1)}
        sup_t ||u(t)||_2 <= ||f||_2 + ||V||^(1/2) ||F||_{L^2(|V|^-1)}

    The wave kind measures ``V`` with anisotropy ``gamma/2``, the data in
    ``H^(gamma/4) x H^(-gamma/4)`` and the uniform bound by
    ``sup_t ||u||_{H^(gamma/4)} + sup_t ||d_t u||_{H^(-gamma/4)}``.
    """
    _check_kind(kind, gamma, 'wellposedness_inequalities')
    weight = V.magnitude()
    anisotropy = gamma / 2 if kind == 'wave' else gamma
    potential_norm = mc_norm(weight, gamma, p, anisotropy, refine=refine).value
    forcing = weighted_l2_norm_inverse(F, weight) if F is not None else 0.0

    if kind == 'wave':
        data = sobolev_norm(f, gamma / 4) + (sobolev_norm(g, -gamma / 4) if g is not None else 0.0)
        velocity = _time_derivative(u)
        lhs2 = (max(sobolev_norm(u.at_time(i), gamma / 4) for i in range(u.grid.Nt))
                + max(sobolev_norm(velocity.at_time(i), -gamma / 4) for i in range(u.grid.Nt)))
    else:
        data = field_l2_norm(f)
        lhs2 = max(field_l2_norm(u.at_time(i)) for i in range(u.grid.Nt))

    root = math.sqrt(potential_norm)
    return InequalityReport(
        lhs1=weighted_l2_norm(u, weight),
        rhs1=root * data + potential_norm * forcing,
        lhs2=lhs2,
        rhs2=data + root * forcing,
    )


def mass_drift(u, V):
    """
    ``max_t | ||u(t)||_2 - ||u(0)||_2 |`` for a solution with a real potential and no forcing.

    Raises:
        ParameterRangeError: if ``V`` has a nonzero imaginary part.
    """
    values = np.asarray(getattr(V, 'values', V))
    if np.iscomplexobj(values) and np.any(values.imag != 0):
        raise ParameterRangeError('mass is conserved only for real potentials', operation='mass_drift')
    grid = u.grid
    masses = np.sqrt(np.sum(np.abs(u.values.reshape(grid.Nt, -1)) ** 2, axis=1) * grid.cell_volume)
    return float(np.max(np.abs(masses - masses[grid.time_zero_index])))

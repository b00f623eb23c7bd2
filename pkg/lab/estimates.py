"""
Estimate verification: ratios of both sides of the weighted smoothing
estimates, the (s, 1/p) region classifier, the frequency-localized
scaling check and the modulated wave packet that breaks the estimate.

Particularly Important Module:
    Every ratio helper returns :class:`EstimateTerms` holding the weighted
    left-hand side, the Morrey-Campanato factor, the data norm and the
    ratio, so that sweeps can log the pieces separately. The ``*_ratio``
    functions return only the ratio.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .constants import (
    COUNTEREXAMPLE_NODES_PER_UNIT,
    REGION_STATUS_CODES,
    SHARPNESS_BOUNDED_SLOPE,
    SHARPNESS_GROWTH_SLOPE,
    SHARPNESS_MIN_SWEEP,
)
from .core import Weight, make_grid, sample_function, weight_model
from .exceptions import (
    GridError,
    ParameterRangeError,
    RegionInconsistencyError,
    WeightError,
    ZeroDenominatorError,
)
from .norms import (
    field_l2_norm,
    maximal_function,
    mc_norm,
    mixed_mc_norm,
    sobolev_norm,
    time_trace_norm,
    weighted_l2_norm,
    weighted_l2_norm_inverse,
)
from .spectral import (
    Spectrum,
    dft_inverse,
    fractional_derivative,
    kdv_symbol,
    littlewood_paley_project,
    propagate_orbit,
    schrodinger_symbol,
    wave_symbol,
)
from .wellposed import duhamel_transform, inverse_wave_symbol

logger = logging.getLogger(__name__)


# Region classifier

@dataclass(frozen=True)
class RegionVerdict:
    """Status of a point ``(s, 1/p)`` and the result that decides it."""

    status: str
    source: str = ''

    @property
    def code(self):
        return REGION_STATUS_CODES[self.status]


def _schrodinger_rules(n, s, p):
    true, false = [], []
    if 0 < s < n / 2 and max(1.0, (n + 2) / (4 * s + 2)) < p <= (n + 2) / (2 * s + 2):
        true.append('schrodinger-smoothing')
    if n / 4 <= s < n / 2 and 1 < p <= (n + 2) / (2 * s + 2):
        true.append('schrodinger-large-s')
    if -1 < s < n / 4 and 1 / p > (4 * s + 2) / (n + 2) and 1 / p > 2 * s:
        false.append('modulated-packet')
    if 0 <= s < n / 4 and p < (n + 4) / (4 * s + 4):
        false.append('schrodinger-large-s-failure')
    return true, false


def _higher_order_rules(gamma, n, s, p, source='higher-order-smoothing'):
    lower = -(gamma - 2) * n / (2 * (n + 2))
    if lower < s < n / 2:
        bound = (n + 2 * (gamma - 1)) / (4 * s + 2 * (gamma - 1))
        if max(1.0, bound) < p <= (n + gamma) / (2 * s + gamma):
            return [source], []
    return [], []


def _wave_rules(n, s, p):
    true = []
    if n >= 2:
        if 0.5 < s < n / 2 and max(1.0, (n + 1) / (4 * s)) < p <= (n + 1) / (2 * s + 1):
            true.append('wave-smoothing')
        if (n + 1) / 4 <= s < n / 2 and 1 < p <= (n + 1) / (2 * s + 1):
            true.append('wave-large-s')
    return true, []


def admissible_region(gamma, n, s, p, kind=None):
    """
    Classify ``(s, 1/p)`` for the homogeneous estimate of order ``gamma``.

    Args:
        gamma: dispersion order; 1 is the half-wave, 2 the Schrödinger case.
        n: spatial dimension.
        s: regularity exponent.
        p: integrability exponent of the weight class.
        kind: ``None`` to pick by ``gamma``, or ``'kdv'`` for the Airy-type
            family on the line (``n = 1``, ``gamma = 2k + 1``).

    Returns:
        RegionVerdict with status ``proven-true``, ``proven-false`` or ``open``.

    Raises:
        ParameterRangeError: if ``gamma < 1`` or ``p < 1``.
        RegionInconsistencyError: if the point is claimed both ways.
    """
    if not gamma >= 1 or not p >= 1:
        raise ParameterRangeError(f'need gamma >= 1 and p >= 1, got gamma={gamma}, p={p}', operation='admissible_region')

    if kind == 'kdv':
        k = (gamma - 1) / 2
        if n != 1 or k != int(k) or k < 1:
            raise ParameterRangeError(f'KdV classification needs n = 1 and odd gamma >= 3, got n={n}, gamma={gamma}',
                                      operation='admissible_region')
        true, false = _higher_order_rules(gamma, 1, s, p, source='kdv-smoothing')
    elif gamma == 1:
        true, false = _wave_rules(n, s, p)
    elif gamma == 2:
        true, false = _schrodinger_rules(n, s, p)
    else:
        true, false = _higher_order_rules(gamma, n, s, p)

    if true and false:
        raise RegionInconsistencyError(
            f'(gamma={gamma}, n={n}, s={s}, p={p}) is claimed true by {true} and false by {false}'
        )
    if true:
        return RegionVerdict('proven-true', true[0])
    if false:
        return RegionVerdict('proven-false', false[0])
    return RegionVerdict('open')


def region_table(gamma, n, s_values, inv_p_values, kind=None):
    """Classify a lattice of ``(s, 1/p)`` points; rows are ``(s, inv_p, verdict)``."""
    outside = [float(inv_p) for inv_p in inv_p_values if not 0 < inv_p <= 1]
    if outside:
        raise ParameterRangeError(f'1/p must lie in (0, 1], got {outside[0]}', operation='region_table')
    return [
        (float(s), float(inv_p), admissible_region(gamma, n, float(s), 1.0 / float(inv_p), kind=kind))
        for s in s_values
        for inv_p in inv_p_values
    ]


def inhomogeneous_admissible(kind, gamma, n, p, s=None, r=None):
    """
    Whether ``(gamma, n, p[, s, r])`` lies in the range of the inhomogeneous estimate of ``kind``.

    Kinds: ``schrodinger`` (kernel ``e^(-i(t-s)|xi|^gamma)``, class exponent
    ``gamma`` and anisotropy ``gamma``), ``wave`` (kernel
    ``e^(i(t-s)rho)/rho``, anisotropy ``gamma/2``), ``wave-frac`` (same
    kernel, mixed-norm denominator) and ``kdv``.
    """
    if kind == 'schrodinger':
        if gamma == 2:
            return math.isclose(p, (n + 2) / 2)
        return gamma > 2 and max(1.0, (n + 2 * (gamma - 1)) / (2 * (gamma - 1))) < p <= (n + gamma) / gamma
    if kind == 'wave':
        if n < 2 or not 2 <= gamma < 2 * n:
            return False
        if gamma == 2:
            return math.isclose(p, (n + 1) / 2)
        return max(1.0, (n - 2 + gamma) / (2 * (gamma - 1))) < p <= (2 * n + gamma) / (2 * gamma)
    if kind == 'wave-frac':
        if s is None or r is None or not 2 <= gamma < 3 * n:
            return False
        if gamma == 2:
            return (n >= 2 and 0.5 < s < 1 and 1 < r <= n / (1 - s)
                    and max(1.0, (n + 1) / (4 * s)) < p <= (n + 1) / (2 * s + 1))
        return (gamma < 2 * n + 2 * s
                and -(gamma - 4) * n / (4 * (n + 2)) < s < min(gamma, n) / 2
                and 1 < r <= 2 * n / (gamma - 2 * s)
                and max(1.0, (n + gamma - 2) / (4 * s + gamma - 2)) < p <= (2 * n + gamma) / (4 * s + gamma))
    if kind == 'kdv':
        k = (gamma - 1) / 2
        return n == 1 and k == int(k) and k >= 1 and (1 + 4 * k) / (4 * k) < p <= (2 * k + 2) / (2 * k + 1)
    raise ParameterRangeError(f'unknown inhomogeneous kind {kind!r}', operation='inhomogeneous_admissible')


def frequency_localized_admissible(gamma, n, alpha, p):
    if not p > 1:
        return False
    if gamma == 1:
        return alpha > 1 + (n + 1) / (2 * p)
    return gamma > 1 and alpha > 1 + (n - 2 + 2 * gamma) / (2 * p)


# Ratios

@dataclass(frozen=True)
class EstimateTerms:
    lhs: float
    norm: float
    data_norm: float
    ratio: float
    scale: float = 1.0


def _terms(lhs, norm_factor, data_norm, operation, norm, scale=1.0):
    denominator = scale * norm_factor * data_norm
    if not denominator > 0 or not math.isfinite(denominator):
        raise ZeroDenominatorError(f'denominator is {denominator!r}', operation=operation)
    return EstimateTerms(lhs=lhs, norm=norm, data_norm=data_norm, ratio=lhs / denominator, scale=scale)


def _require_weight(w, operation):
    if w.is_zero:
        raise ZeroDenominatorError('weight vanishes identically', operation=operation)


def homogeneous_terms(f, w, params, refine=False):
    """Both sides of the homogeneous estimate for ``e^(-it(-Delta)^(gamma/2))``."""
    if not params.is_homogeneous:
        raise ParameterRangeError(f'alpha = {params.alpha} must equal 2s + gamma', operation='homogeneous_ratio')
    _require_weight(w, 'homogeneous_ratio')
    u = propagate_orbit(f, schrodinger_symbol(f.grid, params.gamma), sign=-1)
    lhs = weighted_l2_norm(u, w)
    norm = mc_norm(w, params.alpha, params.p, params.gamma, refine=refine).value
    return _terms(lhs, math.sqrt(norm), sobolev_norm(f, params.s), 'homogeneous_ratio', norm)


def homogeneous_ratio(f, w, params, refine=False):
    """``||e^(-it(-Delta)^(gamma/2)) f||_{L^2(w)} / (||w||^(1/2) ||f||_{H^s})``."""
    return homogeneous_terms(f, w, params, refine=refine).ratio


def kdv_terms(f, w, k, s, p, refine=False):
    """Both sides of the Airy-type estimate with ``gamma = 2k+1`` and ``alpha = 2(s+k)+1``."""
    _require_weight(w, 'kdv_ratio')
    gamma = 2 * k + 1
    u = propagate_orbit(f, kdv_symbol(f.grid, k), sign=-1)
    lhs = weighted_l2_norm(u, w)
    norm = mc_norm(w, 2 * (s + k) + 1, p, gamma, refine=refine).value
    return _terms(lhs, math.sqrt(norm), sobolev_norm(f, s), 'kdv_ratio', norm)


def kdv_ratio(f, w, k, s, p, refine=False):
    return kdv_terms(f, w, k, s, p, refine=refine).ratio


def frequency_localized_terms(f, w, k, params, refine=False):
    """
    ``||e^(it(-Delta)^(gamma/2)) P_k f||_{L^2(w)}`` against ``2^(k(alpha-gamma)/2) ||w||^(1/2) ||f||_2``.
    """
    if not frequency_localized_admissible(params.gamma, params.n, params.alpha, params.p):
        logger.warning('frequency-localized bound is not known to hold at gamma=%g n=%d alpha=%g p=%g',
                       params.gamma, params.n, params.alpha, params.p)
    _require_weight(w, 'frequency_localized_ratio')
    projected = littlewood_paley_project(f, k)
    u = propagate_orbit(projected, schrodinger_symbol(f.grid, params.gamma), sign=1)
    lhs = weighted_l2_norm(u, w)
    norm = mc_norm(w, params.alpha, params.p, params.gamma, refine=refine).value
    scale = 2.0 ** (k * (params.alpha - params.gamma) / 2)
    return _terms(lhs, math.sqrt(norm), field_l2_norm(f), 'frequency_localized_ratio', norm, scale=scale)


def frequency_localized_ratio(f, w, k, params, refine=False):
    return frequency_localized_terms(f, w, k, params, refine=refine).ratio


def inhomogeneous_terms(F, w, params, kind, r=None, refine=False):
    """
    Both sides of an inhomogeneous estimate.

    Args:
        F: forcing term; its grid needs a node at ``t = 0``.
        w: weight, positive wherever ``F`` is nonzero.
        params: exponents; ``alpha`` is not used, the class exponent is
            fixed by ``kind``.
        kind: ``schrodinger``, ``wave``, ``wave-frac`` or ``kdv``
            (``gamma = 2k + 1``).
        r: spatial exponent of the mixed norm for ``wave-frac``.

    Raises:
        ZeroDenominatorError: when ``F`` vanishes.
        WeightError: when ``F`` is supported where ``w`` vanishes.
    """
    operation = 'inhomogeneous_ratio'
    gamma, p, s = params.gamma, params.p, params.s
    if not inhomogeneous_admissible(kind, gamma, params.n, p, s=s, r=r):
        logger.warning('%s inhomogeneous estimate is not known to hold at gamma=%g n=%d p=%g s=%g r=%s',
                       kind, gamma, params.n, p, s, r)
    _require_weight(w, operation)
    data_norm = weighted_l2_norm_inverse(F, w)
    if math.isinf(data_norm):
        raise WeightError('forcing is supported where the weight vanishes', operation=operation)

    grid = F.grid
    if kind == 'schrodinger':
        output = duhamel_transform(F, schrodinger_symbol(grid, gamma), sign=-1)
        norm = mc_norm(w, gamma, p, gamma, refine=refine).value
        factor = norm
    elif kind == 'kdv':
        k = int((gamma - 1) // 2)
        output = duhamel_transform(F, kdv_symbol(grid, k), sign=-1)
        norm = mc_norm(w, gamma, p, gamma, refine=refine).value
        factor = norm
    elif kind == 'wave':
        output = duhamel_transform(F, wave_symbol(grid, gamma), sign=1, amplitude=inverse_wave_symbol(grid, gamma))
        norm = mc_norm(w, gamma, p, gamma / 2, refine=refine).value
        factor = norm
    elif kind == 'wave-frac':
        if r is None:
            raise ParameterRangeError('wave-frac needs the mixed-norm exponent r', operation=operation)
        output = duhamel_transform(F, wave_symbol(grid, gamma), sign=1, amplitude=inverse_wave_symbol(grid, gamma))
        mixed = mixed_mc_norm(w, gamma / 2 - s, r, refine=refine)
        norm = mc_norm(w, 2 * s + gamma / 2, p, gamma, refine=refine).value
        factor = math.sqrt(mixed) * math.sqrt(norm)
    else:
        raise ParameterRangeError(f'unknown inhomogeneous kind {kind!r}', operation=operation)

    return _terms(weighted_l2_norm(output, w), factor, data_norm, operation, norm)


def inhomogeneous_ratio(F, w, params, kind, r=None, refine=False):
    return inhomogeneous_terms(F, w, params, kind, r=r, refine=refine).ratio


def local_smoothing_terms(f, x_index, window=None):
    """
    One-dimensional local smoothing: ``||e^(it Delta) f(x_0, .)||_{L^2_t} / ||f||_{H^-1/2}``.

    Args:
        f: one-dimensional data.
        x_index: grid index of ``x_0`` (an int or a one-element tuple).
        window: optional ``(t_low, t_high)``; the whole time window by default.
    """
    grid = f.grid
    if grid.n != 1:
        raise ParameterRangeError('local smoothing is checked on the line only', operation='local_smoothing_ratio')
    u = propagate_orbit(f, schrodinger_symbol(grid, 2), sign=-1)
    index = tuple(x_index) if isinstance(x_index, tuple) else (int(x_index),)
    trace = u.values[(slice(None),) + index]
    if window is not None:
        low, high = (grid.time_to_index(t) for t in window)
        trace = trace[low:high + 1]
    data_norm = sobolev_norm(f, -0.5)
    return _terms(time_trace_norm(trace, grid), 1.0, data_norm, 'local_smoothing_ratio', 1.0)


def local_smoothing_ratio(f, x_index, window=None):
    return local_smoothing_terms(f, x_index, window=window).ratio


def maximal_function_ratio(w, q, alpha, p, gamma, refine=False):
    """
    Measured constant ``C`` in ``||w_*|| <= C ||w||`` for the class norm.

    Returns:
        ``(C, w_*)``.
    """
    if not (alpha > gamma / p and p > q):
        logger.warning('maximal-function bound is stated for alpha > gamma/p and p > q; got alpha=%g gamma=%g p=%g q=%g',
                       alpha, gamma, p, q)
    _require_weight(w, 'maximal_function_ratio')
    maximal = maximal_function(w, q)
    base = mc_norm(w, alpha, p, gamma, refine=refine).value
    if base <= 0:
        raise ZeroDenominatorError('class norm of the weight vanishes', operation='maximal_function_ratio')
    return mc_norm(maximal, alpha, p, gamma, refine=refine).value / base, maximal


def scaling_homogeneity_check(w, m, alpha, p, gamma, rule=None, refine=False):
    """
    Relative error of ``||w_lambda|| lambda^alpha`` against ``||w||`` with ``w_lambda(x, t) = w(lambda x, lambda^gamma t)``.

    Without ``rule`` the rescaled weight keeps the samples of ``w`` on the
    compatible grid ``(L / lambda, T / lambda^gamma)`` and the identity is
    exact. With ``rule`` (the space-time rule ``w`` was sampled from) the
    rescaled weight is resampled on the same grid, which measures the
    discretisation error for smooth weights.

    Raises:
        GridError: for a non-integer ``m``.
    """
    if int(m) != m:
        raise GridError(f'dyadic exponent m = {m} must be an integer', operation='scaling_homogeneity_check')
    scale = 2.0 ** m
    if rule is None:
        rescaled = Weight(w.grid.dyadic_rescale(m, gamma), w.values)
    else:
        rescaled = sample_function(
            w.grid, lambda t, *xs: rule(scale ** gamma * t, *(scale * x for x in xs)), kind='weight'
        )
    reference = mc_norm(w, alpha, p, gamma, refine=refine).value
    if reference <= 0:
        raise ZeroDenominatorError('class norm of the weight vanishes', operation='scaling_homogeneity_check')
    value = mc_norm(rescaled, alpha, p, gamma, refine=refine).value
    return abs(value * scale ** alpha - reference) / reference


def slope_fit(xs, ys):
    """Least-squares slope of ``log ys`` against ``log xs``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2 or np.any(xs <= 0) or np.any(ys <= 0):
        raise ParameterRangeError('slope fit needs at least two positive samples', operation='slope_fit')
    return float(stats.linregress(np.log(xs), np.log(ys)).slope)


# Modulated wave packet

@dataclass(frozen=True)
class CounterexampleSpec:
    """
    Frequency offset ``M`` and the grid that resolves the modulated packet.

    :meth:`for_modulation` builds the standard grid: ``dx = 1/64``, the box
    half-width is the smallest power of two ``>= M/(2n) + 1``, ``T = 1/(4n)``
    and ``Nt = 4M + 1``, so the tilted slab drifts by whole spatial steps
    between time nodes.
    """

    M: float
    n: int
    grid: object = field(repr=False)

    def __post_init__(self):
        grid, M, n = self.grid, self.M, self.n
        problems = []
        if grid.n != n:
            problems.append(f'grid dimension {grid.n} != {n}')
        if grid.L < M / (2 * n) + 1:
            problems.append(f'L = {grid.L} < M/(2n) + 1 = {M / (2 * n) + 1}')
        if grid.N < 4 * M * grid.L / math.pi:
            problems.append(f'N = {grid.N} < 4ML/pi = {4 * M * grid.L / math.pi:.1f}')
        if grid.T < 1 / (4 * n):
            problems.append(f'T = {grid.T} < 1/(4n)')
        if problems:
            raise GridError('; '.join(problems), operation='build_counterexample')

    @classmethod
    def for_modulation(cls, M, n=1):
        L = 2.0 ** math.ceil(math.log2(M / (2 * n) + 1))
        N = int(2 * L * COUNTEREXAMPLE_NODES_PER_UNIT)
        grid = make_grid(n, N, L, int(4 * M) + 1, 1.0 / (4 * n))
        return cls(M=M, n=n, grid=grid)


def _bump(xi):
    inside = np.abs(xi) < 1
    safe = np.where(inside, xi, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe ** 2)), 0.0)


def build_counterexample(spec):
    """
    The packet ``f^(xi) = phi(xi_1 - M) prod_k phi(xi_k)`` and the slab indicator.

    ``phi(xi) = exp(-1/(1 - xi^2))`` on ``(-1, 1)``. Returns ``(f, w)``.
    """
    grid = spec.grid
    axes = grid.frequency_axes()
    profile = _bump(axes[0] - spec.M)
    for axis in axes[1:]:
        profile = profile * _bump(axis)
    coefficients = (math.pi / grid.L) ** (grid.n / 2) * np.broadcast_to(profile, grid.spatial_shape)
    f = dft_inverse(Spectrum(grid, coefficients))
    w = weight_model(grid, 'slab', M=spec.M)
    return f, w


def counterexample_sample_points(spec):
    """
    Five nodes inside the slab as ``(time_index, spatial_index)`` pairs.

    In the drifting frame ``y = x_1 - 2Mt`` they sit at ``(t, y)`` in
    ``{(0, 0), (h, 0), (-h, 0), (0, h), (h, -h)}`` with ``h = 1/(8n)``.
    """
    grid = spec.grid
    h = 1.0 / (8 * spec.n)
    points = []
    for t, y in ((0.0, 0.0), (h, 0.0), (-h, 0.0), (0.0, h), (h, -h)):
        x = (y + 2 * spec.M * t,) + (0.0,) * (spec.n - 1)
        points.append((grid.time_to_index(t), grid.coordinate_to_index(x)))
    return points


def counterexample_lower_bound(spec, s):
    """``min |(|nabla|^-s e^(it Delta) f)(x, t)| M^s`` over the sample points."""
    f, _ = build_counterexample(spec)
    u = fractional_derivative(propagate_orbit(f, schrodinger_symbol(spec.grid, 2), sign=-1), -s)
    values = [abs(u.values[(i,) + index]) for i, index in counterexample_sample_points(spec)]
    return min(values) * spec.M ** s


@dataclass
class SharpnessResult:
    slope: float
    rows: list

    @property
    def verdict(self):
        """``growth`` when the ratio grows with M, ``bounded`` when it does not, else ``inconclusive``."""
        if self.slope >= SHARPNESS_GROWTH_SLOPE:
            return 'growth'
        if self.slope <= SHARPNESS_BOUNDED_SLOPE:
            return 'bounded'
        return 'inconclusive'


def sharpness_terms(spec, s, p, refine=False):
    """``|| |nabla|^-s e^(it Delta) f ||_{L^2(w)}`` against ``||w||^(1/2) ||f||_2`` for the packet."""
    f, w = build_counterexample(spec)
    u = fractional_derivative(propagate_orbit(f, schrodinger_symbol(spec.grid, 2), sign=-1), -s)
    lhs = weighted_l2_norm(u, w)
    norm = mc_norm(w, 2 * s + 2, p, 2, refine=refine).value
    return _terms(lhs, math.sqrt(norm), field_l2_norm(f), 'sharpness_experiment', norm)


def sharpness_experiment(s, p, n, M_list, refine=False, executor=None):
    """
    Fit the growth of the squared ratio along the modulated packets.

    Args:
        s, p, n: estimate exponents (``gamma = 2``, ``alpha = 2s + 2``).
        M_list: at least three frequency offsets.
        executor: optional ``concurrent.futures`` executor for the sweep.

    Returns:
        SharpnessResult with the slope of ``log(ratio^2)`` against ``log M``
        and one ``(M, terms)`` row per offset, sorted by ``M``.
    """
    M_list = sorted(M_list)
    if len(M_list) < SHARPNESS_MIN_SWEEP:
        raise ParameterRangeError(f'need at least {SHARPNESS_MIN_SWEEP} values of M, got {len(M_list)}',
                                  operation='sharpness_experiment')

    def run(M):
        return sharpness_terms(CounterexampleSpec.for_modulation(M, n), s, p, refine=refine)

    mapper = executor.map if executor is not None else map
    rows = list(zip(M_list, mapper(run, M_list)))
    slope = slope_fit(M_list, [terms.ratio ** 2 for _, terms in rows])
    logger.info('sharpness s=%g p=%g n=%d slope=%.4f', s, p, n, slope)
    return SharpnessResult(slope=slope, rows=rows)


# Data families

def lattice_frequency(grid, M):
    """The lattice frequency ``pi j / L`` nearest to ``M``."""
    return math.pi * round(M * grid.L / math.pi) / grid.L


def modulated(f, M):
    """``e^(iMx_1) f`` with ``M`` moved to the nearest lattice frequency so the product stays periodic."""
    x1 = f.grid.spatial_axes()[0]
    return f.with_values(f.values * np.exp(1j * lattice_frequency(f.grid, M) * x1))


def _unit_field(grid, coefficients, operation):
    f = dft_inverse(Spectrum(grid, coefficients))
    size = field_l2_norm(f)
    if size == 0:
        raise ZeroDenominatorError('profile has no lattice frequency in its support', operation=operation)
    return f * (1.0 / size)


def dyadic_profile(grid, k, relative_width=0.1):
    """
    Unit-norm field whose transform is a bump on the shell ``| |xi| - 2^k | < relative_width 2^k``.

    The same profile rescaled into every dyadic band, as used by the
    frequency-localized scaling check.
    """
    centre = 2.0 ** k
    profile = _bump((grid.frequency_magnitude - centre) / (relative_width * centre))
    return _unit_field(grid, profile, 'dyadic_profile')


def smooth_band_field(grid, seed, band=(1.0, 2.0), modes=3):
    """
    Unit-norm field on the line with a smooth transform supported in ``band`` (positive frequencies).

    The transform is a bump on ``band`` times ``1 + sum_j c_j e^(i j pi u)``
    with ``u`` the position inside the band and ``c_j`` seeded complex
    numbers of modulus below ``1/(2 modes)``, so different seeds give
    different spatially localised fields.
    """
    if grid.n != 1:
        raise ParameterRangeError('band fields are built on the line', operation='smooth_band_field')
    low, high = band
    xi = grid.frequencies
    position = (xi - low) / (high - low)
    rng = np.random.default_rng(seed)
    amplitudes = rng.uniform(0.0, 0.5 / modes, modes) * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, modes))
    modulation = 1 + sum(c * np.exp(1j * (j + 1) * np.pi * position) for j, c in enumerate(amplitudes))
    profile = _bump(2 * position - 1) * modulation
    return _unit_field(grid, profile, 'smooth_band_field')

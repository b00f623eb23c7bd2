"""
Experiment orchestration: one runner per experiment, each turning a
validated configuration into CSV rows and a summary for the manifest.

Sweep points run on a thread pool when more than one thread is requested;
rows are sorted by their leading key columns before they are returned, so
the output does not depend on the thread count.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .config import model_parameters
from .constants import PICARD_MAX_ITER, PICARD_TOL, WEIGHT_SUITE
from .core import EstimateParams, Potential, SpaceTimeField, seeded_random_field, weight_model
from .estimates import (
    dyadic_profile,
    frequency_localized_terms,
    homogeneous_terms,
    kdv_terms,
    local_smoothing_terms,
    maximal_function_ratio,
    modulated,
    region_table,
    scaling_homogeneity_check,
    sharpness_experiment,
    slope_fit,
    smooth_band_field,
)
from .norms import a2_profile, lp_norm, mc_norm
from .output import CSV_SCHEMAS
from .wellposed import mass_drift, picard_solve, potential_rescale, wellposedness_inequalities

logger = logging.getLogger(__name__)

RUNNERS = {}


def runner(name):
    def register(function):
        RUNNERS[name] = function
        return function
    return register


@dataclass
class RunResult:
    experiment: str
    schema: tuple
    rows: list
    summary: dict = field(default_factory=dict)


@contextmanager
def _executor(threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield pool
    else:
        yield None


def _map(executor, function, items):
    if executor is None:
        return [function(item) for item in items]
    return list(executor.map(function, items))


def _weight(config, section='weight'):
    model, parameters = model_parameters(config.section(section))
    return weight_model(config.grid, model, **parameters)


def _band(config):
    band = config.sweep.get('band')
    return tuple(band) if band else None


def _spread(values):
    values = [value for value in values if value > 0]
    return max(values) / min(values) if values else math.nan


def run(config, threads=1):
    """
    Run the experiment a configuration describes.

    Returns:
        RunResult with rows sorted by their key columns.
    """
    logger.info('running %s experiment (threads=%d)', config.experiment, threads)
    with _executor(threads) as executor:
        rows, summary = RUNNERS[config.experiment](config, executor)
    return RunResult(config.experiment, CSV_SCHEMAS[config.experiment], sorted(rows, key=_sort_key), summary)


def _sort_key(row):
    return tuple(row[:2])


@runner('region')
def run_region(config, executor):
    estimate, sweep = config.estimate, config.sweep
    n, gamma = estimate['n'], estimate['gamma']
    kind = 'kdv' if estimate.get('kind') == 'kdv' else None
    s_values = np.linspace(sweep.get('s_min', -1.0), sweep.get('s_max', n / 2), sweep.get('s_points', 200))
    points = sweep.get('inv_p_points', 200)
    inv_p_values = np.linspace(sweep.get('inv_p_min', 1.0 / points), sweep.get('inv_p_max', 1.0), points)

    rows = [(s, inv_p, verdict.code, verdict.source)
            for s, inv_p, verdict in region_table(gamma, n, s_values, inv_p_values, kind=kind)]
    counts = {status: sum(1 for row in rows if row[2] == code)
              for status, code in (('proven-true', 1), ('proven-false', -1), ('open', 0))}
    return rows, counts


@runner('ratio')
def run_ratio(config, executor):
    estimate, grid = config.estimate, config.grid
    params = EstimateParams.homogeneous(grid.n, estimate['gamma'], estimate['s'], estimate['p'])
    w = _weight(config)
    band = _band(config)
    refine = estimate.get('refine', False)

    def point(task):
        seed, M = task
        f = modulated(seeded_random_field(grid, seed, band=band), M)
        terms = homogeneous_terms(f, w, params, refine=refine)
        return (seed, M, terms.lhs, terms.norm, terms.data_norm, terms.ratio)

    tasks = [(seed, M) for seed in config.sweep['seeds'] for M in config.sweep['M']]
    rows = _map(executor, point, tasks)
    summary = {'max_ratio': max(row[5] for row in rows)}
    if len(set(config.sweep['M'])) >= 2:
        summary['max_slope'] = max(
            slope_fit([row[1] for row in rows if row[0] == seed], [row[5] for row in rows if row[0] == seed])
            for seed in config.sweep['seeds']
        )
    return rows, summary


@runner('freq-local')
def run_frequency_localized(config, executor):
    estimate, grid = config.estimate, config.grid
    gamma, alpha = estimate['gamma'], estimate['alpha']
    params = EstimateParams(n=grid.n, gamma=gamma, s=(alpha - gamma) / 2, p=estimate['p'], alpha=alpha)
    w = _weight(config)
    refine = estimate.get('refine', False)

    def point(k):
        terms = frequency_localized_terms(dyadic_profile(grid, k), w, k, params, refine=refine)
        return (k, terms.lhs, terms.norm, terms.scale, terms.ratio)

    rows = _map(executor, point, config.sweep['k'])
    return rows, {'spread': _spread([row[4] for row in rows])}


@runner('sharpness')
def run_sharpness(config, executor):
    estimate = config.estimate
    result = sharpness_experiment(
        estimate['s'], estimate['p'], estimate['n'], config.sweep['M'],
        refine=estimate.get('refine', False), executor=executor,
    )
    rows = [(M, terms.lhs, terms.norm, terms.ratio) for M, terms in result.rows]
    return rows, {'slope': result.slope, 'verdict': result.verdict}


@runner('mcnorm')
def run_mcnorm(config, executor):
    estimate, grid = config.estimate, config.grid
    alpha, p, gamma, q = estimate['alpha'], estimate['p'], estimate['gamma'], estimate['q']
    m = config.sweep.get('m', 1)
    refine = estimate.get('refine', False)

    def point(name):
        model, parameters = WEIGHT_SUITE[name]
        w = weight_model(grid, model, **parameters)
        result = mc_norm(w, alpha, p, gamma, refine=refine)
        witness = result.witness
        ratio, maximal = maximal_function_ratio(w, q, alpha, p, gamma, refine=refine)
        profile = a2_profile(maximal)
        a2_max = float(np.nanmax(profile)) if np.any(np.isfinite(profile)) else math.nan
        return (
            name, alpha, p, gamma, result.value,
            ' '.join(format(x, '.17g') for x in witness.x) if witness.x is not None else '',
            witness.t if witness.t is not None else math.nan,
            witness.r if witness.r is not None else math.nan,
            lp_norm(w, p),
            scaling_homogeneity_check(w, m, alpha, p, gamma, refine=refine),
            ratio, a2_max,
        )

    rows = _map(executor, point, config.sweep['weights'])
    return rows, {
        'max_maximal_ratio': max(row[10] for row in rows),
        'max_a2': max((row[11] for row in rows if not math.isnan(row[11])), default=math.nan),
        'max_homogeneity_error': max(row[9] for row in rows),
    }


@runner('solve')
def run_solve(config, executor):
    estimate, grid = config.estimate, config.grid
    gamma, p, kind = estimate['gamma'], estimate['p'], estimate['kind']
    solve = config.section('solve')
    tol = solve.get('tol') or PICARD_TOL
    max_iter = solve.get('max_iter') or PICARD_MAX_ITER
    forcing = solve.get('forcing') or 0.0
    profile = _weight(config, 'potential')
    amplitude = config.section('potential').get('amplitude')
    V = Potential(grid, (1.0 if amplitude is None else amplitude) * profile.values)
    band = _band(config)

    def point(seed):
        f = seeded_random_field(grid, seed, band=band)
        g = seeded_random_field(grid, seed + 1, band=band) if kind == 'wave' else None
        F = None
        if forcing:
            F = SpaceTimeField(grid, forcing * profile.values * f.values)
        scale, small, _ = potential_rescale(f, V, F=F, gamma=gamma, kind=kind, g=g)
        u, report = picard_solve(f, small, F=F, gamma=gamma, kind=kind, g=g, tol=tol, max_iter=max_iter)
        report.scale = scale
        bounds = wellposedness_inequalities(u, f, small, p, gamma=gamma, F=F, kind=kind, g=g)
        drift = mass_drift(u, small) if kind == 'schrodinger' and F is None else math.nan
        return (seed, scale, report.iterations, report.residual, report.max_contraction,
                bounds.lhs1, bounds.rhs1, bounds.lhs2, bounds.rhs2, drift), report.converged

    results = _map(executor, point, config.sweep['seeds'])
    rows = [row for row, _ in results]
    return rows, {
        'all_converged': all(converged for _, converged in results),
        'max_ratio1': max(_ratio(row[5], row[6]) for row in rows),
        'max_ratio2': max(_ratio(row[7], row[8]) for row in rows),
    }


def _ratio(lhs, rhs):
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


@runner('kdv')
def run_kdv(config, executor):
    estimate, grid = config.estimate, config.grid
    k, s, p = estimate['k'], estimate['s'], estimate['p']
    w = _weight(config)
    band = _band(config)
    refine = estimate.get('refine', False)

    def point(task):
        seed, M = task
        f = modulated(seeded_random_field(grid, seed, band=band), M)
        terms = kdv_terms(f, w, k, s, p, refine=refine)
        return (seed, M, terms.lhs, terms.norm, terms.ratio)

    tasks = [(seed, M) for seed in config.sweep['seeds'] for M in config.sweep['M']]
    rows = _map(executor, point, tasks)
    return rows, {'max_ratio': max(row[4] for row in rows)}


@runner('smoothing')
def run_smoothing(config, executor):
    grid = config.grid
    band = _band(config) or (1.0, 2.0)
    x_index = grid.coordinate_to_index((config.estimate.get('x0') or 0.0,))

    def point(seed):
        terms = local_smoothing_terms(smooth_band_field(grid, seed, band=band), x_index)
        return (seed, terms.lhs, terms.data_norm, terms.ratio)

    rows = _map(executor, point, config.sweep['seeds'])
    return rows, {'spread': _spread([row[3] for row in rows])}

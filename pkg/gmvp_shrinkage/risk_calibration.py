# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.risk_calibration
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Choosing the shrinkage intensity from data alone. For each rho the realized
GMVP risk divided by kappa = tr(C)/N is estimated consistently by

    sigma_sc^2(rho) = gamma_sc / (1 - (1 - rho) c_N)
                      * 1^T C^-1 M C^-1 1 / (1^T C^-1 1)^2,

    gamma_sc = 1 / (1 - (1 - rho) c_N) * (1/n) sum_t x_t^T C^-1 x_t / ||x_t||^2,

with C the shrinkage-Tyler estimate and M = (C - rho I) / (1 - rho) formed
directly from the normalized scatter so that rho = 1 needs no special case.
kappa does not depend on rho, so minimizing sigma_sc^2 over a grid selects
the risk-minimizing intensity.
"""

import json
import logging

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg as sla

from gmvp_shrinkage.data_model import admissible_rho_range
from gmvp_shrinkage.errors import (DegenerateDataError, NoFixedPointError,
                                   SolverError, ValidationError)
from gmvp_shrinkage.estimators import (SolverOptions, checked_samples,
                                       normalized_scatter, tyler_shrinkage,
                                       whitened_norms)
from gmvp_shrinkage.portfolio_risk import gmvp_weights, realized_risk
from gmvp_shrinkage.utils.misc import fan_out

logger = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 50
DEFAULT_EPSILON = 0.01

GridPoint = namedtuple('GridPoint', ['rho', 'sigma_sc', 'gamma_sc',
                                     'realized_risk', 'iterations'])


@dataclass(frozen=True)
class RiskCurve:
    """A criterion sampled over a rho grid together with its grid minimizer.

    ``criterion`` names what ``sigma_sc`` holds: the scaled risk estimate
    (the default) or, for oracle curves, the true realized risk. NaN entries
    are grid points without a fixed point.
    """

    rho_grid: np.ndarray
    sigma_sc: np.ndarray
    rho_star: float
    gamma_sc_at_star: float = None
    criterion: str = 'sigma_sc'
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        rho_grid = np.asarray(self.rho_grid, dtype=float)
        values = np.asarray(self.sigma_sc, dtype=float)
        object.__setattr__(self, 'rho_grid', rho_grid)
        object.__setattr__(self, 'sigma_sc', values)

        if rho_grid.shape != values.shape or rho_grid.size < 2:
            raise ValidationError('Grid and values must have equal length >= 2')
        if np.any(np.diff(rho_grid) <= 0):
            raise ValidationError('rho grid must be increasing')

    @property
    def star_index(self):
        return int(np.flatnonzero(self.rho_grid == self.rho_star)[0])

    def to_frame(self):
        return pd.DataFrame({'rho': self.rho_grid, self.criterion: self.sigma_sc})

    def to_dict(self):
        return {'criterion': self.criterion,
                'rho_grid': self.rho_grid.tolist(),
                self.criterion: [None if np.isnan(value) else value
                                 for value in self.sigma_sc.tolist()],
                'rho_star': self.rho_star,
                'gamma_sc_at_star': self.gamma_sc_at_star,
                'metadata': self.metadata}

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format='%.12g')
        return path

    def to_json(self, path):
        with open(path, 'w', encoding='utf-8') as out_fh:
            json.dump(self.to_dict(), out_fh, indent=2, sort_keys=True)
        return path


def _sample_terms(panel, est):
    (samples, norms) = checked_samples(panel)
    return (samples, norms, whitened_norms(samples, est.matrix))


def _scale_factor(est):
    return 1.0 / (1.0 - (1.0 - est.rho) * (est.N / est.n))


def gamma_hat_sc(panel, est):
    """Consistent estimate of gamma / kappa at the estimate's rho.

    Args:
        panel (ReturnPanel): The panel ``est`` was computed from.
        est (ShrinkageEstimate): Shrinkage-Tyler estimate.

    Requires:
        None

    Returns:
        float: gamma_sc, exactly 1 at rho = 1.
    """
    (_, norms, forms) = _sample_terms(panel, est)
    return float(_scale_factor(est) * np.mean(forms / norms))


def scaled_risk_estimate(panel, est):
    """Consistent estimate of (realized risk) / kappa of the plug-in GMVP.

    Args:
        panel (ReturnPanel): The panel ``est`` was computed from.
        est (ShrinkageEstimate): Shrinkage-Tyler estimate; rho may be 1.

    Requires:
        None

    Returns:
        float: sigma_sc^2(rho).

    Example:
        est = tyler_shrinkage(panel, 0.6)
        kappa_free_risk = scaled_risk_estimate(panel, est)
    """
    (samples, norms, forms) = _sample_terms(panel, est)
    factor = _scale_factor(est)
    gamma_sc = factor * np.mean(forms / norms)

    scatter = normalized_scatter(samples, norms, est.matrix)
    solved = sla.cho_solve(sla.cho_factor(est.matrix, lower=True),
                           np.ones(est.N))

    return float(gamma_sc * factor * (solved @ scatter @ solved) / solved.sum() ** 2)


def risk_grid(N, n, grid_size=DEFAULT_GRID_SIZE, epsilon=DEFAULT_EPSILON):
    """Uniform rho grid over [epsilon + max(0, 1 - n/N), 1]."""
    if int(grid_size) != grid_size or grid_size < 2:
        raise ValidationError('grid_size must be an integer >= 2', grid_size)

    (lower, upper) = admissible_rho_range(N, n, epsilon)
    grid = np.linspace(lower, upper, int(grid_size))
    grid[-1] = 1.0

    return grid


def sweep_grid(panel, grid, opts=None, cov_true=None, threads=1,
               skip_unconverged=False):
    """Solves the fixed point at every grid rho and scores it.

    Each point starts from the identity, so the result does not depend on
    evaluation order or on ``threads``. Points where the fixed point does
    not exist (rho at or below 1 - rank/N, which happens at the left end of
    the grid when n <= N) are logged and returned with NaN scores.
    Non-convergence raises SolverError unless ``skip_unconverged`` is set.

    Args:
        panel (ReturnPanel): Training returns.
        grid (numpy.ndarray): Increasing rho values.
        opts (SolverOptions): Fixed-point solver settings.
        cov_true (numpy.ndarray): When given, the oracle realized risk of each
            plug-in portfolio is also reported.
        threads (int): Worker threads.
        skip_unconverged (bool): Log and score as NaN the points whose fixed
            point did not converge instead of raising SolverError.

    Requires:
        None

    Returns:
        list: One GridPoint per rho, in grid order.
    """
    opts = opts or SolverOptions()

    def _evaluate(rho):
        try:
            est = tyler_shrinkage(panel, rho, opts)
        except NoFixedPointError as err:
            logger.warning('Skipping rho=%.6g: no fixed point below 1 - rank/N = %.6g',
                           rho, err.floor)
            return GridPoint(float(rho), np.nan, np.nan, np.nan, 0)
        except SolverError as err:
            if skip_unconverged:
                logger.warning('Skipping rho=%.6g: %s', rho, err.args[0])
                return GridPoint(float(rho), np.nan, np.nan, np.nan, err.iterations)
            raise err.at_rho(rho) from err

        oracle = np.nan
        if cov_true is not None:
            oracle = realized_risk(gmvp_weights(est.matrix), cov_true)

        return GridPoint(float(rho), scaled_risk_estimate(panel, est),
                         gamma_hat_sc(panel, est), oracle, est.iterations)

    return fan_out(_evaluate, grid, threads)


def curve_from_points(points, criterion='sigma_sc', metadata=None):
    """Builds a RiskCurve from grid points; ties go to the smallest rho.

    NaN values mark grid points without a fixed point and never win.
    """
    rho_grid = np.array([point.rho for point in points])
    values = np.array([getattr(point, criterion) for point in points], dtype=float)
    feasible = ~np.isnan(values)
    if not feasible.any() or np.isinf(values[feasible]).any():
        raise DegenerateDataError('Criterion is not finite on the grid', criterion)

    star = int(np.nanargmin(values))
    gamma = points[star].gamma_sc if criterion == 'sigma_sc' else None

    return RiskCurve(rho_grid, values, float(rho_grid[star]), gamma, criterion,
                     dict(metadata or {}))


def _curve_metadata(panel, grid_size, epsilon, opts):
    return {'N': panel.N, 'n': panel.n, 'c_N': panel.c_N, 'grid_size': int(grid_size),
            'epsilon': epsilon, 'tolerance': opts.tolerance,
            'max_iterations': opts.max_iterations, 'initializer': opts.initializer}


def optimize_rho(panel, grid_size=DEFAULT_GRID_SIZE, epsilon=DEFAULT_EPSILON,
                 opts=None, threads=1):
    """Grid search for the rho minimizing the scaled risk estimate.

    Args:
        panel (ReturnPanel): Training returns.
        grid_size (int): Number of grid points (>= 2).
        epsilon (float): Margin above the open lower end of the rho domain.
        opts (SolverOptions): Fixed-point solver settings.
        threads (int): Worker threads for grid points.

    Requires:
        None

    Returns:
        RiskCurve: The full curve with rho_star at its grid argmin.
    """
    opts = opts or SolverOptions()
    grid = risk_grid(panel.N, panel.n, grid_size, epsilon)
    points = sweep_grid(panel, grid, opts, threads=threads)

    curve = curve_from_points(points, 'sigma_sc',
                              _curve_metadata(panel, grid_size, epsilon, opts))
    logger.debug('rho_star=%.4f over %s grid points', curve.rho_star, grid.size)

    return curve


def oracle_rho(panel, cov_true, grid_size=DEFAULT_GRID_SIZE, epsilon=DEFAULT_EPSILON,
               opts=None, threads=1):
    """Grid minimizer of the true realized risk; needs the population C."""
    opts = opts or SolverOptions()
    grid = risk_grid(panel.N, panel.n, grid_size, epsilon)
    points = sweep_grid(panel, grid, opts, cov_true=cov_true, threads=threads)

    return curve_from_points(points, 'realized_risk',
                             _curve_metadata(panel, grid_size, epsilon, opts))


def build_optimized_portfolio(panel, grid_size=DEFAULT_GRID_SIZE,
                              epsilon=DEFAULT_EPSILON, opts=None, threads=1):
    """Calibrates rho, re-solves the fixed point there and forms the GMVP.

    Returns:
        tuple: (RiskCurve, ShrinkageEstimate, Portfolio)
    """
    opts = opts or SolverOptions()
    curve = optimize_rho(panel, grid_size, epsilon, opts, threads)

    try:
        est = tyler_shrinkage(panel, curve.rho_star, opts)
    except SolverError as err:
        raise err.at_rho(curve.rho_star) from err

    return (curve, est, gmvp_weights(est.matrix, panel.asset_ids))

# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.portfolio_risk
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Global minimum variance portfolio weights and the risk functionals used to
judge them. All risks are variances; annualization lives in the backtest.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from gmvp_shrinkage.errors import NumericError, ValidationError

## Smallest accepted lambda_min / lambda_max, in units of N * machine epsilon.
RCOND_FLOOR = np.finfo(float).eps


@dataclass(frozen=True)
class Portfolio:
    """Fully invested weight vector; short positions are allowed."""

    weights: np.ndarray
    asset_ids: tuple = None

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

        if self.asset_ids is None:
            object.__setattr__(self, 'asset_ids', tuple(range(weights.size)))
        else:
            object.__setattr__(self, 'asset_ids', tuple(self.asset_ids))

        if len(self.asset_ids) != weights.size:
            raise ValidationError('Weights and asset labels differ in length',
                                  (weights.size, len(self.asset_ids)))
        ## Rounding in the normalization grows with the gross exposure.
        if abs(weights.sum() - 1.0) > 1e-12 * max(1.0, np.abs(weights).sum()):
            raise ValidationError('Portfolio weights must sum to one', weights.sum())


def _spd_solve_ones(cov):
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValidationError('Covariance must be a square matrix', cov.shape)

    (lowest, highest) = sla.eigvalsh(cov)[[0, -1]]
    if highest <= 0 or lowest <= RCOND_FLOOR * cov.shape[0] * highest:
        raise NumericError('Covariance is singular or not positive definite',
                           lowest / highest if highest > 0 else 0.0)

    try:
        factor = sla.cho_factor(cov, lower=True)
    except sla.LinAlgError as err:
        raise NumericError('Covariance is not symmetric positive definite') from err

    return sla.cho_solve(factor, np.ones(cov.shape[0]))


def gmvp_weights(cov, asset_ids=None):
    """C^-1 1 / (1^T C^-1 1) via a Cholesky solve.

    Args:
        cov (numpy.ndarray): Symmetric positive definite covariance estimate.
        asset_ids (list): Optional labels carried into the Portfolio.

    Requires:
        None

    Returns:
        Portfolio: Minimum variance weights summing to one.

    Example:
        gmvp_weights(np.diag([1.0, 2.0])).weights
        # array([0.66666667, 0.33333333])
    """
    solved = _spd_solve_ones(cov)
    weights = solved / solved.sum()

    return Portfolio(weights, asset_ids)


def uniform_portfolio(asset_ids):
    """Naive 1/N diversification, the identity plug-in case."""
    N = len(asset_ids)
    weights = np.full(N, 1.0 / N)

    return Portfolio(weights, asset_ids)


def theoretical_risk(cov):
    """Minimum attainable variance 1 / (1^T C^-1 1) under known C."""
    return float(1.0 / _spd_solve_ones(cov).sum())


def realized_risk(h, cov_true):
    """Out-of-sample variance h^T C h of a portfolio under the true C."""
    weights = h.weights if isinstance(h, Portfolio) else np.asarray(h, dtype=float)
    cov_true = np.asarray(cov_true, dtype=float)
    if cov_true.shape != (weights.size, weights.size):
        raise ValidationError('Portfolio and covariance dimensions differ',
                              (weights.size, cov_true.shape))

    return float(weights @ cov_true @ weights)


def in_sample_risk(h, cov_est):
    """h^T C_hat h with the estimate standing in for the true covariance.

    Understates the realized risk of plug-in portfolios.
    """
    return realized_risk(h, cov_est)

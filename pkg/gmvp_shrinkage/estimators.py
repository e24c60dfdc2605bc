# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.estimators
~~~~~~~~~~~~~~~~~~~~~~~~~

Covariance estimators: the sample covariance matrix and the shrinkage-Tyler
fixed point

    C = (1 - rho) (1/n) sum_t x_t x_t^T / ((1/N) x_t^T C^-1 x_t) + rho I

over the demeaned samples x_t, solved by Picard iteration.

Taking (1/N) tr(C^-1 .) of both sides shows every solution satisfies
(1/N) tr C^-1 = 1. Between Picard steps the iterate is rescaled onto that
set, which leaves the fixed point where it is. The same identity rules out
a solution when rho <= 1 - r/N, r being the rank of the demeaned samples
(min(N, n - 1) for generic data).
"""

import logging

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.optimize as sopt

from gmvp_shrinkage.data_model import open_lower_bound
from gmvp_shrinkage.errors import (DegenerateDataError, NoFixedPointError,
                                   NumericError, SolverError, ValidationError)

logger = logging.getLogger(__name__)

INITIALIZERS = ('identity', 'scaled_scm')

## Quadratic forms below this fraction of (1/N)||x||^2 are treated as zero.
QUAD_FORM_FLOOR = 1e-14

## rho within this distance of 1 - r/N counts as having no fixed point.
RANK_FLOOR_MARGIN = 1e-9


@dataclass(frozen=True)
class SolverOptions:
    """Stopping rule and starting point of the fixed-point iteration."""

    tolerance: float = 1e-10
    max_iterations: int = 500
    initializer: str = 'identity'

    def __post_init__(self):
        if not 1e-14 <= self.tolerance <= 1e-2:
            raise ValidationError('tolerance must lie in [1e-14, 1e-2]', self.tolerance)
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValidationError('max_iterations must be a positive integer',
                                  self.max_iterations)
        if self.initializer not in INITIALIZERS:
            raise ValidationError('Unknown initializer', self.initializer)


@dataclass(frozen=True)
class ShrinkageEstimate:
    """A converged shrinkage-Tyler estimate and its solver diagnostics."""

    matrix: np.ndarray
    rho: float
    iterations: int
    residual: float
    N: int
    n: int
    tolerance: float

    def __post_init__(self):
        self.matrix.setflags(write=False)


def _symmetrize(matrix):
    return (matrix + matrix.T) / 2.0


def sample_covariance(panel):
    """(1/n) sum_t x_t x_t^T over the demeaned samples.

    Args:
        panel (ReturnPanel): Return panel; demeaned internally when untagged.

    Requires:
        None

    Returns:
        numpy.ndarray: N x N symmetric positive semidefinite matrix of rank at
            most min(N, n - 1).
    """
    if panel.n < 2:
        raise ValidationError('Sample covariance needs n >= 2', panel.n)

    centered = panel.centered()
    return _symmetrize(centered @ centered.T / panel.n)


def check_rho(N, n, rho):
    """Raises ValidationError unless rho lies in (max(0, 1 - n/N), 1]."""
    lower = open_lower_bound(N, n)
    if not (lower < rho <= 1.0):
        raise ValidationError('rho outside the admissible interval (%.6g, 1]' % lower,
                              rho)


def checked_samples(panel):
    """Demeaned samples and their squared norms; rejects zero samples."""
    samples = panel.centered()
    norms = np.einsum('it,it->t', samples, samples)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateDataError('Demeaned sample is the zero vector', int(zero[0]))

    return (samples, norms)


def whitened_norms(samples, matrix):
    """x_t^T C^-1 x_t for every column x_t, from one Cholesky factor."""
    try:
        lower = sla.cholesky(matrix, lower=True, check_finite=False)
    except sla.LinAlgError as err:
        raise NumericError('Matrix is not positive definite') from err

    whitened = sla.solve_triangular(lower, samples, lower=True, check_finite=False)
    return np.einsum('it,it->t', whitened, whitened)


def quadratic_forms(samples, matrix):
    """(1/N) x_t^T C^-1 x_t for every column x_t."""
    return whitened_norms(samples, matrix) / samples.shape[0]


def normalized_scatter(samples, norms, matrix):
    """(1/n) sum_t x_t x_t^T / ((1/N) x_t^T C^-1 x_t).

    This is the data term of the fixed point without its (1 - rho) weight.
    """
    (N, n) = samples.shape
    forms = quadratic_forms(samples, matrix)

    vanishing = np.flatnonzero(forms < QUAD_FORM_FLOOR * norms / N)
    if vanishing.size:
        raise DegenerateDataError('Quadratic form vanished for sample',
                                  int(vanishing[0]))

    return _symmetrize((samples / forms) @ samples.T / n)


def _fixed_point_map(samples, norms, matrix, rho):
    N = samples.shape[0]
    return (1.0 - rho) * normalized_scatter(samples, norms, matrix) + rho * np.eye(N)


def fixed_point_floor(samples):
    """max(0, 1 - r/N) for demeaned samples of rank r."""
    N = samples.shape[0]
    return max(0.0, 1.0 - np.linalg.matrix_rank(samples) / N)


def trace_normalized(scatter, rho):
    """a (1 - rho) S + rho I with a > 0 chosen so that (1/N) tr C^-1 = 1.

    Args:
        scatter (numpy.ndarray): Normalized scatter S of the current iterate.
        rho (float): Shrinkage intensity below 1 and above the rank floor.

    Requires:
        None

    Returns:
        numpy.ndarray: The rescaled iterate.
    """
    N = scatter.shape[0]
    weights = (1.0 - rho) * np.clip(sla.eigvalsh(scatter), 0.0, None)

    def _excess(a):
        return np.mean(1.0 / (a * weights + rho)) - 1.0

    hi = 1.0
    while _excess(hi) > 0.0:
        hi *= 2.0
        if not np.isfinite(hi):
            raise NumericError('No trace normalization for this scatter', rho)

    a = sopt.brentq(_excess, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return _symmetrize(a * (1.0 - rho) * scatter + rho * np.eye(N))


def _initial_matrix(samples, rho, initializer):
    N = samples.shape[0]
    if initializer == 'identity':
        return np.eye(N)

    scm = samples @ samples.T / samples.shape[1]
    scm *= N / np.trace(scm)
    return _symmetrize((1.0 - rho) * scm + rho * np.eye(N))


def tyler_shrinkage(panel, rho, opts=None):
    """Solves the shrinkage-Tyler fixed point at intensity rho.

    Takes Picard steps P_k = RHS(C_k) until the relative Frobenius change
    ||P_k - C_k|| / ||P_k|| drops below ``opts.tolerance`` and returns P_k.
    Otherwise the next iterate C_{k+1} is P_k with its data term rescaled
    so that (1/N) tr C_{k+1}^-1 = 1. With the identity start, rho = 1
    returns I_N exactly after one step.

    Args:
        panel (ReturnPanel): Return panel; demeaned internally when untagged.
        rho (float): Shrinkage intensity in (max(0, 1 - n/N), 1].
        opts (SolverOptions): Solver settings, defaults when None.

    Requires:
        None

    Returns:
        ShrinkageEstimate: The converged estimate.

    Example:
        from gmvp_shrinkage.estimators import SolverOptions, tyler_shrinkage

        est = tyler_shrinkage(panel, 0.5, SolverOptions(tolerance=1e-12))
        print(est.iterations, est.residual)
    """
    opts = opts or SolverOptions()
    check_rho(panel.N, panel.n, rho)

    (samples, norms) = checked_samples(panel)
    if rho < 1.0:
        floor = fixed_point_floor(samples)
        if rho <= floor + RANK_FLOOR_MARGIN:
            raise NoFixedPointError('No fixed point at rho=%.6g; rho must exceed '
                                    '1 - rank/N = %.6g' % (rho, floor), rho, floor)

    N = samples.shape[0]
    matrix = _initial_matrix(samples, rho, opts.initializer)

    residual = np.inf
    for iteration in range(1, opts.max_iterations + 1):
        scatter = normalized_scatter(samples, norms, matrix)
        updated = (1.0 - rho) * scatter + rho * np.eye(N)
        residual = (np.linalg.norm(updated - matrix, 'fro') /
                    np.linalg.norm(updated, 'fro'))

        if residual <= opts.tolerance:
            logger.debug('Fixed point at rho=%.6g converged in %s iterations '
                         '(residual %.3e)', rho, iteration, residual)
            return ShrinkageEstimate(updated, float(rho), iteration, float(residual),
                                     panel.N, panel.n, opts.tolerance)

        matrix = trace_normalized(scatter, rho)

    raise SolverError('Fixed point did not converge at rho=%.6g' % rho,
                      float(residual), opts.max_iterations, rho)


def fixed_point_defect(panel, matrix, rho):
    """Relative Frobenius defect ||C - RHS(C)|| / ||C|| of a candidate C.

    Recomputed from the definition so tests can audit reported residuals.
    """
    (samples, norms) = checked_samples(panel)
    rhs = _fixed_point_map(samples, norms, np.asarray(matrix, dtype=float), rho)

    return float(np.linalg.norm(matrix - rhs, 'fro') / np.linalg.norm(matrix, 'fro'))

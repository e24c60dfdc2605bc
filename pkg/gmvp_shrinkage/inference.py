# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.inference
~~~~~~~~~~~~~~~~~~~~~~~~

Bootstrap test for equal variance of two paired return series.

The statistic is the log-variance difference T = ln s_a^2 - ln s_b^2. Both
series are resampled with the same circular blocks so the pairing between
strategies is kept. Replicates T* are centered at T and compared to |T| on
the scale of their bootstrap standard deviation; that common scale cancels
in the two-sided p-value, p = mean(|T* - T| >= |T|).

This approximates the HAC-studentized bootstrap used for Sharpe and variance
comparisons in the portfolio literature; it does not reproduce its kernel.
"""

import json
import logging

from dataclasses import asdict, dataclass

import numpy as np

from gmvp_shrinkage.errors import DegenerateDataError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_LENGTH = 5
DEFAULT_ITERATIONS = 2000


@dataclass(frozen=True)
class BootstrapTest:
    """Outcome of one variance-difference bootstrap test."""

    statistic: float
    p_value: float
    block_length: int
    iterations: int
    seed: int
    bootstrap_sd: float = float('nan')

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValidationError('p-value outside [0, 1]', self.p_value)
        if self.iterations < 1:
            raise ValidationError('iterations must be >= 1', self.iterations)

    @property
    def stars(self):
        return significance_stars(self.p_value)

    def to_dict(self):
        return asdict(self)

    def to_json(self, path):
        with open(path, 'w', encoding='utf-8') as out_fh:
            json.dump(self.to_dict(), out_fh, indent=2, sort_keys=True)
        return path


def significance_stars(p_value):
    """'**' below 0.01, '*' below 0.05, '' otherwise."""
    if p_value < 0.01:
        return '**'
    if p_value < 0.05:
        return '*'
    return ''


def circular_block_indices(m, block_length, rng):
    """Indices of one circular block resample of a length-m series.

    ceil(m / block_length) block starts are drawn uniformly from [0, m);
    each block wraps around the end of the series and the concatenation is
    cut back to m indices.
    """
    n_blocks = -(-m // block_length)
    starts = rng.integers(0, m, size=n_blocks)
    indices = (starts[:, None] + np.arange(block_length)[None, :]) % m

    return indices.ravel()[:m]


def _log_variance(series):
    return np.log(np.var(series, axis=-1, ddof=1))


def variance_difference_test(r_a, r_b, block_length=DEFAULT_BLOCK_LENGTH,
                             iterations=DEFAULT_ITERATIONS, seed=0):
    """Two-sided paired circular-block bootstrap test of equal variances.

    Replicate k draws its blocks from ``SeedSequence(seed).spawn(iterations)[k]``
    so the p-value does not depend on how replicates are scheduled.

    Args:
        r_a (list): Returns of strategy A.
        r_b (list): Returns of strategy B, same length and dates as r_a.
        block_length (int): Circular block length b.
        iterations (int): Bootstrap replicates.
        seed (int): Root seed.

    Requires:
        None

    Returns:
        BootstrapTest: Statistic, p-value and test parameters.

    Example:
        from gmvp_shrinkage.inference import variance_difference_test

        report = variance_difference_test(st_returns, scm_returns, 5, 2000, 1)
        print(report.p_value, report.stars)
    """
    r_a = np.asarray(r_a, dtype=float)
    r_b = np.asarray(r_b, dtype=float)

    if r_a.shape != r_b.shape or r_a.ndim != 1:
        raise ValidationError('Series must be 1-D and of equal length',
                              (r_a.shape, r_b.shape))
    if int(block_length) != block_length or block_length < 1:
        raise ValidationError('block_length must be a positive integer', block_length)
    if r_a.size < 2 * block_length:
        raise ValidationError('Series shorter than two blocks', (r_a.size, block_length))
    if iterations < 1:
        raise ValidationError('iterations must be >= 1', iterations)
    if np.ptp(r_a) == 0 or np.ptp(r_b) == 0:
        raise DegenerateDataError('Constant return series has no variance')

    statistic = float(_log_variance(r_a) - _log_variance(r_b))

    streams = np.random.SeedSequence(int(seed)).spawn(int(iterations))
    replicates = np.empty(int(iterations))
    for (k, stream) in enumerate(streams):
        idx = circular_block_indices(r_a.size, int(block_length),
                                     np.random.default_rng(stream))
        with np.errstate(divide='ignore'):
            replicates[k] = _log_variance(r_a[idx]) - _log_variance(r_b[idx])

    ## Resamples that happen to be constant carry no information.
    replicates = replicates[np.isfinite(replicates)]
    if replicates.size == 0:
        raise DegenerateDataError('Every bootstrap resample was constant')

    deviations = np.abs(replicates - statistic)
    p_value = float(np.mean(deviations >= abs(statistic)))
    bootstrap_sd = float(np.std(replicates, ddof=1)) if replicates.size > 1 else 0.0

    logger.debug('Variance test: T=%.4f p=%.4f (b=%s, B=%s)', statistic, p_value,
                 block_length, iterations)

    return BootstrapTest(statistic, p_value, int(block_length), int(iterations),
                         int(seed), bootstrap_sd)

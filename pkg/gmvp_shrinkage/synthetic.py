# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.synthetic
~~~~~~~~~~~~~~~~~~~~~~~~

Seeded generators for simulation studies: elliptical samples

    x_t = mu + sqrt(tau_t) C^(1/2) y_t,   ||y_t||^2 = N,

and the one-factor population covariance b b^T sigma^2 + sigma_r^2 I.

Every sample t draws from its own PCG64 stream seeded with
``numpy.random.SeedSequence([seed, t])``, so a panel is identical no matter
how its columns are generated.
"""

import logging

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg as sla

from gmvp_shrinkage.data_model import ReturnPanel
from gmvp_shrinkage.errors import ValidationError

logger = logging.getLogger(__name__)

RNG_NAME = 'numpy.PCG64(SeedSequence([seed, t]))'
TAU_LAWS = ('constant', 'student_t')
FIRST_TRADING_DAY = '2011-01-03'

## Larger chi-square draws are redrawn; tau stays above d / CHI2_CEILING.
CHI2_CEILING = 1e12


@dataclass(frozen=True)
class TauLaw:
    """Law of the radial variable tau: constant 1 or d / chi^2_d."""

    kind: str = 'student_t'
    d: int = 3

    def __post_init__(self):
        if self.kind not in TAU_LAWS:
            raise ValidationError('Unknown tau law', self.kind)
        if self.kind == 'student_t' and (int(self.d) != self.d or self.d < 3):
            raise ValidationError('Student-T degrees of freedom must be an integer >= 3',
                                  self.d)

    @property
    def mean(self):
        return 1.0 if self.kind == 'constant' else self.d / (self.d - 2.0)

    def as_dict(self):
        if self.kind == 'constant':
            return {'kind': 'constant'}
        return {'kind': self.kind, 'd': int(self.d)}


@dataclass(frozen=True)
class EllipticalSpec:
    """Everything needed to draw one synthetic return panel."""

    C: np.ndarray
    n: int
    seed: int
    tau_law: TauLaw = field(default_factory=TauLaw)
    mu: np.ndarray = None

    def __post_init__(self):
        C = np.array(self.C, dtype=float)
        C.setflags(write=False)
        object.__setattr__(self, 'C', C)

        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] < 2:
            raise ValidationError('C must be a square matrix with N >= 2', C.shape)
        if not np.allclose(C, C.T, rtol=0, atol=1e-12 * np.abs(C).max()):
            raise ValidationError('C must be symmetric')
        try:
            sla.cholesky(C, lower=True)
        except sla.LinAlgError as err:
            raise ValidationError('C must be positive definite') from err

        mu = np.zeros(C.shape[0]) if self.mu is None else np.array(self.mu, dtype=float)
        if mu.shape != (C.shape[0],):
            raise ValidationError('mu length does not match C', mu.shape)
        mu.setflags(write=False)
        object.__setattr__(self, 'mu', mu)

        if int(self.n) != self.n or self.n < 2:
            raise ValidationError('n must be an integer >= 2', self.n)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError('seed must be a 64-bit unsigned integer', self.seed)

    @property
    def N(self):
        return self.C.shape[0]


def one_factor_covariance(N, sigma, b_lo, b_hi, sigma_r):
    """b b^T sigma^2 + sigma_r^2 I with loadings b evenly spaced in [b_lo, b_hi].

    Args:
        N (int): Number of assets.
        sigma (float): Factor volatility.
        b_lo (float): Smallest factor loading.
        b_hi (float): Largest factor loading.
        sigma_r (float): Residual volatility.

    Requires:
        None

    Returns:
        numpy.ndarray: N x N covariance with N - 1 eigenvalues at sigma_r^2.

    Example:
        C = one_factor_covariance(200, 0.16, 0.5, 1.5, 0.2)
    """
    if N < 2:
        raise ValidationError('Need N >= 2', N)
    if b_lo > b_hi:
        raise ValidationError('b_lo must not exceed b_hi', (b_lo, b_hi))
    if sigma <= 0 or sigma_r <= 0:
        raise ValidationError('Volatilities must be positive', (sigma, sigma_r))

    loadings = np.linspace(b_lo, b_hi, N)
    return np.outer(loadings, loadings) * sigma ** 2 + sigma_r ** 2 * np.eye(N)


def draw_tau(tau_law, size, rng):
    """Draws ``size`` radial variables from ``tau_law`` with generator ``rng``."""
    if tau_law.kind == 'constant':
        return np.ones(size)

    chi2 = rng.chisquare(tau_law.d, size=size)
    redraw = chi2 > CHI2_CEILING
    while np.any(redraw):
        chi2[redraw] = rng.chisquare(tau_law.d, size=int(redraw.sum()))
        redraw = chi2 > CHI2_CEILING

    return tau_law.d / chi2


def draw_sphere(N, rng):
    """Uniform draw on the sphere of radius sqrt(N) in R^N."""
    gaussian = rng.standard_normal(N)
    return np.sqrt(N) * gaussian / np.linalg.norm(gaussian)


def sample_stream(seed, t):
    """The generator owning sample t of a panel seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(t)]))


def draw_elliptical_factors(spec):
    """Sphere directions Y (N x n) and radial variables tau (n) of a panel."""
    directions = np.empty((spec.N, spec.n))
    tau = np.empty(spec.n)

    for t in range(spec.n):
        rng = sample_stream(spec.seed, t)
        directions[:, t] = draw_sphere(spec.N, rng)
        tau[t] = draw_tau(spec.tau_law, 1, rng)[0]

    return (directions, tau)


def symmetric_sqrt(C):
    """C^(1/2) from the symmetric eigendecomposition."""
    (eigenvalues, eigenvectors) = sla.eigh(C)
    return (eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ eigenvectors.T


def trading_dates(count, start=FIRST_TRADING_DAY):
    """``count`` consecutive business days starting at ``start``."""
    return list(pd.bdate_range(start=start, periods=count))


def sample_elliptical(spec, asset_ids=None):
    """Draws the return panel described by ``spec``.

    Args:
        spec (EllipticalSpec): Population parameters, sample count and seed.
        asset_ids (list): Optional labels; defaults to A001, A002, ...

    Requires:
        None

    Returns:
        ReturnPanel: Untagged N x n panel, deterministic given the seed.

    Example:
        from gmvp_shrinkage.synthetic import (EllipticalSpec, TauLaw,
                                              one_factor_covariance,
                                              sample_elliptical)

        C = one_factor_covariance(100, 0.16, 0.5, 1.5, 0.2)
        panel = sample_elliptical(EllipticalSpec(C, n=200, seed=7,
                                                 tau_law=TauLaw('student_t', 3)))
    """
    (directions, tau) = draw_elliptical_factors(spec)
    samples = spec.mu[:, None] + symmetric_sqrt(spec.C) @ (directions * np.sqrt(tau))

    if asset_ids is None:
        asset_ids = ['A%03d' % (i + 1) for i in range(spec.N)]

    return ReturnPanel(samples, asset_ids, trading_dates(spec.n))

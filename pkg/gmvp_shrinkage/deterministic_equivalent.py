# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.deterministic_equivalent
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Large-dimensional limits of the shrinkage-Tyler portfolio risk when the
population covariance C is known. These serve as test oracles and as a fast
risk predictor in simulations.

The spectral quantities are finite averages over the eigenvalues of C:

    gamma:  1 = (1/N) sum_i lambda_i / (gamma rho + (1 - rho) lambda_i)
    beta:   (1/N) sum_i c gamma^2 lambda_i^2 / (gamma rho + (1 - rho) lambda_i)^2

and the risk limit is

    sigma_bar^2(rho) = gamma^2 / (gamma^2 - beta (1 - rho)^2)
                       * 1^T A^-1 C A^-1 1 / (1^T A^-1 1)^2,
    A = (1 - rho) / gamma C + rho I.
"""

import logging

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.optimize as sopt

from gmvp_shrinkage.errors import NumericError, ValidationError

logger = logging.getLogger(__name__)

## gamma / kappa is searched in this bracket.
GAMMA_BRACKET = (1e-6, 1e6)
GAMMA_XTOL = 1e-13


@dataclass(frozen=True)
class SpectralModel:
    """Eigenvalues of C (ascending), aspect ratio c and mean eigenvalue kappa."""

    eigenvalues: np.ndarray
    c: float
    kappa: float = None

    def __post_init__(self):
        eigenvalues = np.sort(np.asarray(self.eigenvalues, dtype=float))
        eigenvalues.setflags(write=False)
        object.__setattr__(self, 'eigenvalues', eigenvalues)

        if eigenvalues.size == 0 or np.any(eigenvalues <= 0):
            raise ValidationError('Spectrum must be non-empty and positive')
        if self.c <= 0:
            raise ValidationError('Aspect ratio c must be positive', self.c)

        mean = float(eigenvalues.mean())
        if self.kappa is None:
            object.__setattr__(self, 'kappa', mean)
        elif abs(self.kappa - mean) > 1e-12 * max(1.0, mean):
            raise ValidationError('kappa must equal the eigenvalue mean', self.kappa)

    @classmethod
    def from_covariance(cls, cov, c):
        """Builds the model from a symmetric positive definite matrix."""
        return cls(sla.eigvalsh(np.asarray(cov, dtype=float)), c)

    @property
    def second_moment(self):
        return float(np.mean(self.eigenvalues ** 2))


def _check_rho(model, rho):
    lower = max(0.0, 1.0 - 1.0 / model.c)
    if not (lower < rho <= 1.0):
        raise ValidationError('rho outside (max(0, 1 - 1/c), 1]', rho)


def gamma_equation(model, rho, gamma):
    """Left side minus one of the gamma equation; strictly decreasing in gamma."""
    lam = model.eigenvalues
    return float(np.mean(lam / (gamma * rho + (1.0 - rho) * lam)) - 1.0)


def solve_gamma(model, rho):
    """Unique positive root gamma of the spectral equation at rho.

    Bisection runs on the scale-free unknown gamma / kappa over
    [1e-6, 1e6], after checking the sign change across the bracket.

    Args:
        model (SpectralModel): Spectrum of C and aspect ratio.
        rho (float): Shrinkage intensity in (max(0, 1 - 1/c), 1].

    Requires:
        None

    Returns:
        float: gamma, in the units of the eigenvalues.

    Example:
        solve_gamma(SpectralModel([1.0, 3.0], c=0.5), 0.5)
        # 1.7320508075688772
    """
    _check_rho(model, rho)
    scaled = SpectralModel(model.eigenvalues / model.kappa, model.c)

    def _equation(ratio):
        return gamma_equation(scaled, rho, ratio)

    (lo, hi) = GAMMA_BRACKET
    (f_lo, f_hi) = (_equation(lo), _equation(hi))
    if not (f_lo > 0 > f_hi):
        raise NumericError('gamma equation does not change sign over bracket',
                           (f_lo, f_hi))

    ratio = sopt.bisect(_equation, lo, hi, xtol=GAMMA_XTOL, maxiter=400)
    return float(ratio * model.kappa)


def beta_coeff(model, rho, gamma):
    """(1/N) sum_i c gamma^2 lambda_i^2 / (gamma rho + (1 - rho) lambda_i)^2."""
    lam = model.eigenvalues
    denom = gamma * rho + (1.0 - rho) * lam
    return float(np.mean(model.c * gamma ** 2 * lam ** 2 / denom ** 2))


def risk_deterministic_equivalent(C, rho, c):
    """Deterministic equivalent sigma_bar^2(rho) of the realized GMVP risk.

    Args:
        C (numpy.ndarray): Population covariance (SPD).
        rho (float): Shrinkage intensity, admissible for c.
        c (float): Aspect ratio N / n; finite-sample c_N in practice.

    Requires:
        None

    Returns:
        float: The limiting realized variance of the shrinkage-Tyler GMVP.
    """
    C = np.asarray(C, dtype=float)
    model = SpectralModel.from_covariance(C, c)
    gamma = solve_gamma(model, rho)
    beta = beta_coeff(model, rho, gamma)

    gap = gamma ** 2 - beta * (1.0 - rho) ** 2
    if gap <= 0:
        raise NumericError('Deterministic equivalent undefined: gamma^2 <= '
                           'beta (1 - rho)^2', (rho, gamma, beta))

    N = C.shape[0]
    resolvent = (1.0 - rho) / gamma * C + rho * np.eye(N)
    solved = sla.cho_solve(sla.cho_factor(resolvent, lower=True), np.ones(N))

    risk = (gamma ** 2 / gap) * (solved @ C @ solved) / solved.sum() ** 2
    logger.debug('sigma_bar^2(%.4g) = %.6g (gamma=%.6g, beta=%.6g)', rho, risk,
                 gamma, beta)

    return float(risk)


def deterministic_risk_curve(C, rho_grid, c):
    """sigma_bar^2 at every grid point, for plotting next to a RiskCurve."""
    return np.array([risk_deterministic_equivalent(C, rho, c) for rho in rho_grid])

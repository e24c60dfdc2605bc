# -*- coding: utf-8 -*-

import numpy as np
import pytest

from gmvp_shrinkage.data_model import ReturnPanel, prices_from_returns, write_price_csv
from gmvp_shrinkage.synthetic import (EllipticalSpec, TauLaw, one_factor_covariance,
                                      sample_elliptical, trading_dates)

## Daily-scale one-factor model: 1.6% factor and 2% residual volatility.
DAILY_FACTOR = dict(sigma=0.016, b_lo=0.5, b_hi=1.5, sigma_r=0.02)
ONE_FACTOR_PARAMS = dict(sigma=0.16, b_lo=0.5, b_hi=1.5, sigma_r=0.2)


def student_panel(N, n, seed, C=None, d=3):
    """Seeded Student-T panel; identity covariance unless C is given."""
    C = np.eye(N) if C is None else C
    return sample_elliptical(EllipticalSpec(C, n, seed, TauLaw('student_t', d)))


def two_atom_covariance(N):
    """diag(1, ..., 1, 3, ..., 3): a spectrum that stays bounded as N grows."""
    return np.diag(np.repeat([1.0, 3.0], [N - N // 2, N // 2]))


def gaussian_like_panel(returns):
    """Wraps a raw N x n array with default labels and business-day dates."""
    returns = np.asarray(returns, dtype=float)
    return ReturnPanel(returns, ['A%03d' % (i + 1) for i in range(returns.shape[0])],
                       trading_dates(returns.shape[1]))


@pytest.fixture
def make_panel():
    return student_panel


@pytest.fixture
def daily_panel():
    """Six assets over 736 return periods, the backtest bookkeeping panel."""
    C = one_factor_covariance(6, **DAILY_FACTOR)
    return student_panel(6, 736, 11, C)


@pytest.fixture
def price_file(tmp_path, daily_panel):
    """737 price rows, hence 736 returns."""
    path = tmp_path / 'prices.csv'
    write_price_csv(prices_from_returns(daily_panel, initial=100.0), path)
    return str(path)


@pytest.fixture
def wrap_returns():
    return gaussian_like_panel

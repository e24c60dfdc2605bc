# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.backtest
~~~~~~~~~~~~~~~~~~~~~~~

Rolling-window out-of-sample evaluation of GMVP strategies.

At every rebalance period t = window, window + hold, ... the covariance is
estimated from returns [t - window, t - 1], GMVP weights are formed and held
fixed over the next min(hold, remaining) periods. The final partial block is
kept, so a panel of L return periods yields exactly L - window out-of-sample
portfolio returns.
"""

import json
import logging

from dataclasses import asdict, dataclass, field, replace

import numpy as np
import pandas as pd

from gmvp_shrinkage.errors import (BacktestError, DegenerateDataError, GMVPError,
                                   UsageError, ValidationError)
from gmvp_shrinkage.estimators import SolverOptions, sample_covariance, tyler_shrinkage
from gmvp_shrinkage.portfolio_risk import gmvp_weights, uniform_portfolio
from gmvp_shrinkage.risk_calibration import build_optimized_portfolio
from gmvp_shrinkage.utils.misc import fan_out

logger = logging.getLogger(__name__)

ESTIMATORS = ('st_optimized', 'st_fixed', 'scm', 'identity')
ANNUALIZATION_DAYS = 252


@dataclass(frozen=True)
class BacktestConfig:
    """Rolling-window settings for one estimator.

    ``rho`` is only used by ``st_fixed``; ``grid_size`` and ``epsilon`` only
    by ``st_optimized``.
    """

    window: int
    hold: int = 10
    estimator: str = 'st_optimized'
    grid_size: int = 50
    epsilon: float = 0.01
    rho: float = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    annualization_days: int = ANNUALIZATION_DAYS
    threads: int = 1

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 2:
            raise ValidationError('window must be an integer >= 2', self.window)
        if int(self.hold) != self.hold or self.hold < 1:
            raise ValidationError('hold must be an integer >= 1', self.hold)
        if self.estimator not in ESTIMATORS:
            raise ValidationError('Unknown estimator', self.estimator)
        if self.estimator == 'st_fixed' and self.rho is None:
            raise ValidationError('st_fixed needs a rho')
        if self.annualization_days < 1:
            raise ValidationError('annualization_days must be >= 1',
                                  self.annualization_days)

    def as_dict(self):
        config = asdict(self)
        config.pop('threads')
        return config


@dataclass(frozen=True)
class BacktestResult:
    """Out-of-sample record of one rolling backtest."""

    oos_returns: np.ndarray
    oos_dates: tuple
    realized_risk_annualized: float
    per_window_rhos: tuple
    rebalance_indices: tuple
    weights: np.ndarray
    config: BacktestConfig

    def to_frame(self):
        return pd.DataFrame({'date': [str(d) for d in self.oos_dates],
                             'oos_return': self.oos_returns})

    def to_dict(self):
        return {'config': self.config.as_dict(),
                'realized_risk_annualized': self.realized_risk_annualized,
                'oos_returns': self.oos_returns.tolist(),
                'oos_dates': [str(d) for d in self.oos_dates],
                'per_window_rhos': list(self.per_window_rhos),
                'rebalance_indices': list(self.rebalance_indices)}

    def to_json(self, path):
        with open(path, 'w', encoding='utf-8') as out_fh:
            json.dump(self.to_dict(), out_fh, indent=2, sort_keys=True)
        return path


def annualized_risk(returns, annualization_days=ANNUALIZATION_DAYS):
    """Sample standard deviation (divisor m - 1) times sqrt(annualization_days).

    A constant series has risk exactly 0.
    """
    returns = np.asarray(returns, dtype=float)
    if returns.size < 2:
        raise ValidationError('Need at least 2 returns', returns.size)
    if np.ptp(returns) == 0:
        return 0.0

    return float(np.std(returns, ddof=1) * np.sqrt(annualization_days))


def rolling_risk_series(returns, window, annualization_days=ANNUALIZATION_DAYS):
    """Annualized standard deviation over each run of ``window`` returns.

    Returns:
        numpy.ndarray: length(returns) - window + 1 values, one per one-step
            shift of the window.
    """
    returns = np.asarray(returns, dtype=float)
    if window < 2 or window > returns.size:
        raise ValidationError('Rolling window must lie in [2, length]',
                              (window, returns.size))

    rolling = pd.Series(returns).rolling(window)
    rolling_std = rolling.std(ddof=1).to_numpy(copy=True)[window - 1:]
    ## Constant windows are exactly 0.
    constant = (rolling.max() - rolling.min()).to_numpy()[window - 1:] == 0
    rolling_std[constant] = 0.0

    return rolling_std * np.sqrt(annualization_days)


def _estimate_weights(train, cfg):
    if np.any(np.ptp(train.returns, axis=1) == 0):
        zero_var = [train.asset_ids[i] for i in
                    np.flatnonzero(np.ptp(train.returns, axis=1) == 0)]
        raise DegenerateDataError('Zero-variance asset in training window', zero_var)

    if cfg.estimator == 'identity':
        return (uniform_portfolio(train.asset_ids), None)
    if cfg.estimator == 'scm':
        return (gmvp_weights(sample_covariance(train), train.asset_ids), None)
    if cfg.estimator == 'st_fixed':
        est = tyler_shrinkage(train, cfg.rho, cfg.solver)
        return (gmvp_weights(est.matrix, train.asset_ids), est.rho)

    (curve, _, portfolio) = build_optimized_portfolio(train, cfg.grid_size,
                                                      cfg.epsilon, cfg.solver)
    return (portfolio, curve.rho_star)


def rolling_backtest(panel, cfg):
    """Runs the rolling-window evaluation of one estimator.

    Args:
        panel (ReturnPanel): Untagged returns covering training and test days.
        cfg (BacktestConfig): Window, stride and estimator settings.

    Requires:
        None

    Returns:
        BacktestResult: Chronological out-of-sample returns and risk summary.

    Example:
        from gmvp_shrinkage.backtest import BacktestConfig, rolling_backtest

        result = rolling_backtest(panel, BacktestConfig(window=300, hold=10))
        print(result.realized_risk_annualized)
    """
    if panel.demeaned:
        raise UsageError('Backtests need the raw, untagged return panel')
    if cfg.window + 1 > panel.n:
        raise ValidationError('Panel too short for the training window',
                              (panel.n, cfg.window))

    starts = list(range(cfg.window, panel.n, cfg.hold))

    def _rebalance(t):
        train = panel.window(t - cfg.window, t)
        try:
            (portfolio, rho) = _estimate_weights(train, cfg)
        except GMVPError as err:
            raise BacktestError('Estimation failed for window starting at %s: %s'
                                % (t - cfg.window, err), t - cfg.window) from err

        logger.debug('Rebalanced at period %s (rho=%s)', t, rho)
        block = panel.returns[:, t:min(t + cfg.hold, panel.n)]
        return (portfolio.weights, rho, portfolio.weights @ block)

    rebalances = fan_out(_rebalance, starts, cfg.threads)

    oos_returns = np.concatenate([oos for (_, _, oos) in rebalances])
    rhos = tuple(rho for (_, rho, _) in rebalances if rho is not None)
    weights = np.column_stack([w for (w, _, _) in rebalances])

    return BacktestResult(oos_returns, tuple(panel.dates[cfg.window:]),
                          annualized_risk(oos_returns, cfg.annualization_days),
                          rhos, tuple(starts), weights, cfg)


def window_sweep(panel, windows, cfg):
    """Annualized realized risk of ``cfg.estimator`` for each training window.

    Returns:
        pandas.DataFrame: Columns window, estimator, risk.
    """
    rows = []
    for window in windows:
        result = rolling_backtest(panel, replace(cfg, window=int(window)))
        rows.append({'window': int(window), 'estimator': cfg.estimator,
                     'risk': result.realized_risk_annualized})

    return pd.DataFrame(rows, columns=['window', 'estimator', 'risk'])


def lowest_risk_share(rolling):
    """Fraction of rolling periods in which each strategy had the lowest risk.

    Args:
        rolling (dict): Strategy name -> rolling risk series of equal length.

    Returns:
        dict: Strategy name -> share in [0, 1]; ties go to the first listed.
    """
    names = list(rolling)
    stacked = np.vstack([np.asarray(rolling[name], dtype=float) for name in names])
    winners = np.argmin(stacked, axis=0)

    return {name: float(np.mean(winners == idx)) for (idx, name) in enumerate(names)}

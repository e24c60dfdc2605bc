# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.tasks.backtest
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Rolling-window backtest of several GMVP strategies on one price file.

The first configured window is the reporting window. For it the task writes

    risk_table.csv    estimator, risk, p_value, stars
    oos_returns.csv   date plus one out-of-sample return column per estimator
    rolling_risk.csv  date plus one rolling annualized risk column per estimator
    rhos.csv          estimator, rebalance_index, date, rho

and backtest.json with per-estimator summaries and the share of time each
strategy had the lowest rolling risk. With more than one window the annualized
risk of every (window, estimator) pair goes to window_sweep.csv.
"""

import logging
import os

from dataclasses import replace

import numpy as np
import pandas as pd

from gmvp_shrinkage.backtest import (BacktestConfig, lowest_risk_share,
                                     rolling_backtest, rolling_risk_series,
                                     window_sweep)
from gmvp_shrinkage.data_model import load_price_csv, log_returns
from gmvp_shrinkage.errors import ValidationError
from gmvp_shrinkage.inference import variance_difference_test
from gmvp_shrinkage.tasks import common

logger = logging.getLogger(__name__)

REFERENCE_ESTIMATOR = 'st_optimized'


def plan_backtest(spec):
    """Builds and validates one BacktestConfig per estimator.

    Returns:
        tuple: (windows, {estimator: BacktestConfig at the reporting window})
    """
    params = spec.params

    windows = [int(window) for window in params['windows']]
    estimators = list(params['estimators'])
    if not windows or not estimators:
        raise ValidationError('windows and estimators must be non-empty',
                              (windows, estimators))
    if len(set(estimators)) != len(estimators):
        raise ValidationError('Duplicate estimators', estimators)

    configs = {}
    for estimator in estimators:
        configs[estimator] = BacktestConfig(
            window=windows[0], hold=params['hold'], estimator=estimator,
            grid_size=params['grid_size'], epsilon=params['epsilon'],
            rho=params.get('rho'), solver=spec.solver_options(),
            annualization_days=params['annualization_days'], threads=spec.threads)
        ## Sweep windows only need to pass the config checks here.
        for window in windows[1:]:
            replace(configs[estimator], window=window)

    bootstrap = params['bootstrap']
    if bootstrap['iterations'] < 1 or bootstrap['block_length'] < 1:
        raise ValidationError('Bad bootstrap block', bootstrap)

    return (windows, configs)


def _check_lengths(panel, windows, rolling_window):
    for window in windows:
        if window + 1 > panel.n:
            raise ValidationError('Price file too short for training window',
                                  (panel.n, window))
    if not 2 <= rolling_window <= panel.n - windows[0]:
        raise ValidationError('rolling_window must lie in [2, out-of-sample length]',
                              (rolling_window, panel.n - windows[0]))


def risk_table(results, reference, bootstrap, seed):
    """Annualized risk per estimator with a bootstrap p-value against ``reference``.

    Returns:
        pandas.DataFrame: Columns estimator, risk, p_value, stars.
    """
    base = results[reference].oos_returns
    rows = []
    for (estimator, result) in results.items():
        report = variance_difference_test(result.oos_returns, base,
                                          bootstrap['block_length'],
                                          bootstrap['iterations'], seed)
        rows.append({'estimator': estimator,
                     'risk': result.realized_risk_annualized,
                     'p_value': report.p_value, 'stars': report.stars})

    return pd.DataFrame(rows, columns=['estimator', 'risk', 'p_value', 'stars'])


def _rho_frame(results, dates):
    rows = []
    for (estimator, result) in results.items():
        for (start, rho) in zip(result.rebalance_indices, result.per_window_rhos):
            rows.append({'estimator': estimator, 'rebalance_index': start,
                         'date': str(dates[start].date()), 'rho': rho})

    return pd.DataFrame(rows, columns=['estimator', 'rebalance_index', 'date', 'rho'])


def run_backtest(spec, output_dir):
    """Runs every configured strategy and writes the backtest tables.

    Args:
        spec (ExperimentSpec): Resolved backtest spec naming ``prices``.
        output_dir (string): Directory receiving the output files.

    Requires:
        None

    Returns:
        list: Paths of the written files.

    Example:
        from gmvp_shrinkage.tasks.backtest import run_backtest
        from gmvp_shrinkage.tasks.common import resolve_spec, run_task

        spec = resolve_spec('backtest', 'hsi_backtest.yaml', '/tmp/backtest')
        run_task(run_backtest, spec)
    """
    params = spec.params
    prices_file = common.required_path(params, 'prices')
    (windows, configs) = plan_backtest(spec)

    panel = log_returns(load_price_csv(prices_file))
    _check_lengths(panel, windows, params['rolling_window'])

    results = {}
    for (estimator, cfg) in configs.items():
        results[estimator] = rolling_backtest(panel, cfg)
        logger.info('%s: annualized risk %.4f over %s out-of-sample days', estimator,
                    results[estimator].realized_risk_annualized,
                    results[estimator].oos_returns.size)

    reference = REFERENCE_ESTIMATOR if REFERENCE_ESTIMATOR in results else next(iter(results))
    table_df = risk_table(results, reference, params['bootstrap'], spec.seed)

    oos_dates = [str(d.date()) for d in results[reference].oos_dates]
    oos_df = pd.DataFrame({'date': oos_dates})
    rolling_df = pd.DataFrame({'date': oos_dates[params['rolling_window'] - 1:]})
    rolling = {}
    for (estimator, result) in results.items():
        oos_df[estimator] = result.oos_returns
        rolling[estimator] = rolling_risk_series(result.oos_returns,
                                                 params['rolling_window'],
                                                 result.config.annualization_days)
        rolling_df[estimator] = rolling[estimator]

    shares = lowest_risk_share(rolling)

    out_files = [
        common.write_csv_with_spec(table_df, os.path.join(output_dir, 'risk_table.csv'),
                                   spec),
        common.write_csv_with_spec(oos_df, os.path.join(output_dir, 'oos_returns.csv'),
                                   spec),
        common.write_csv_with_spec(rolling_df,
                                   os.path.join(output_dir, 'rolling_risk.csv'), spec),
        common.write_csv_with_spec(_rho_frame(results, panel.dates),
                                   os.path.join(output_dir, 'rhos.csv'), spec)]

    if len(windows) > 1:
        sweep_df = pd.concat(
            [window_sweep(panel, windows[1:], cfg) for cfg in configs.values()] +
            [pd.DataFrame([{'window': windows[0], 'estimator': name,
                            'risk': result.realized_risk_annualized}])
             for (name, result) in results.items()], ignore_index=True)
        sweep_df = sweep_df.sort_values('window', kind='stable')
        out_files.append(common.write_csv_with_spec(
            sweep_df.reset_index(drop=True),
            os.path.join(output_dir, 'window_sweep.csv'), spec))

    summary = {
        'reference': reference,
        'window': windows[0],
        'n_returns': panel.n,
        'lowest_risk_share': shares,
        'estimators': {
            name: {'realized_risk_annualized': result.realized_risk_annualized,
                   'n_oos': int(result.oos_returns.size),
                   'n_rolling': int(rolling[name].size),
                   'n_rebalances': len(result.rebalance_indices),
                   'mean_rho': (float(np.mean(result.per_window_rhos))
                                if result.per_window_rhos else None),
                   'config': result.config.as_dict()}
            for (name, result) in results.items()},
        'risk_table': table_df.to_dict(orient='records')}

    out_files.append(common.write_json_with_spec(
        summary, os.path.join(output_dir, 'backtest.json'), spec))

    return out_files

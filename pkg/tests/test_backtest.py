# -*- coding: utf-8 -*-

import json
import math

import numpy as np
import pytest

from gmvp_shrinkage.backtest import (BacktestConfig, annualized_risk, lowest_risk_share,
                                     rolling_backtest, rolling_risk_series, window_sweep)
from gmvp_shrinkage.data_model import demean
from gmvp_shrinkage.errors import BacktestError, UsageError, ValidationError


def test_short_panel_gives_two_blocks(daily_panel):
    panel = daily_panel.window(0, 320)
    result = rolling_backtest(panel, BacktestConfig(window=300, hold=10, estimator='scm'))

    assert result.oos_returns.size == 20
    assert result.rebalance_indices == (300, 310)
    assert result.weights.shape == (6, 2)
    assert result.oos_dates == panel.dates[300:]


def test_bookkeeping_counts(daily_panel):
    result = rolling_backtest(daily_panel, BacktestConfig(window=300, hold=10,
                                                          estimator='identity'))

    assert result.oos_returns.size == 436
    assert len(result.rebalance_indices) == 44
    assert rolling_risk_series(result.oos_returns, 70).size == 367


def test_identity_returns_cross_sectional_mean(daily_panel):
    result = rolling_backtest(daily_panel, BacktestConfig(window=300, estimator='identity'))

    np.testing.assert_allclose(result.oos_returns,
                               daily_panel.returns[:, 300:].mean(axis=0),
                               rtol=0, atol=1e-15)
    assert result.per_window_rhos == ()


def test_identity_risk_ignores_asset_order(daily_panel, wrap_returns):
    reversed_panel = wrap_returns(daily_panel.returns[::-1])
    cfg = BacktestConfig(window=300, estimator='identity')

    assert rolling_backtest(reversed_panel, cfg).realized_risk_annualized == \
        pytest.approx(rolling_backtest(daily_panel, cfg).realized_risk_annualized,
                      rel=1e-12)


def test_optimized_backtest_records_rhos_and_is_deterministic(daily_panel):
    panel = daily_panel.window(0, 340)
    cfg = BacktestConfig(window=300, hold=10, grid_size=5)

    first = rolling_backtest(panel, cfg)
    threaded = rolling_backtest(panel, BacktestConfig(window=300, hold=10, grid_size=5,
                                                      threads=3))

    assert len(first.per_window_rhos) == len(first.rebalance_indices) == 4
    assert all(0.01 <= rho <= 1.0 for rho in first.per_window_rhos)
    np.testing.assert_array_equal(first.oos_returns, threaded.oos_returns)
    assert first.per_window_rhos == threaded.per_window_rhos


def test_fixed_rho_estimator(daily_panel):
    panel = daily_panel.window(0, 330)
    result = rolling_backtest(panel, BacktestConfig(window=300, estimator='st_fixed',
                                                    rho=0.4))

    assert result.per_window_rhos == (0.4, 0.4, 0.4)


def test_result_serialization(tmp_path, daily_panel):
    result = rolling_backtest(daily_panel.window(0, 310),
                              BacktestConfig(window=300, estimator='scm'))
    with open(result.to_json(tmp_path / 'result.json'), encoding='utf-8') as in_fh:
        payload = json.load(in_fh)

    assert payload['config']['estimator'] == 'scm'
    assert payload['config']['annualization_days'] == 252
    assert len(payload['oos_returns']) == 10
    assert list(result.to_frame().columns) == ['date', 'oos_return']


def test_annualized_risk_examples():
    assert annualized_risk([0.01] * 5) == 0.0
    assert annualized_risk([0.1] * 7, 1) == 0.0

    m = 10
    alternating = [0.02, -0.02] * (m // 2)
    expected = 0.02 * math.sqrt(m / (m - 1))
    assert annualized_risk(alternating, 1) == pytest.approx(expected, rel=1e-12)
    assert annualized_risk(alternating) == pytest.approx(expected * math.sqrt(252),
                                                         rel=1e-12)

    with pytest.raises(ValidationError):
        annualized_risk([0.1])


def test_rolling_risk_series_examples():
    returns = np.random.default_rng(0).standard_normal(436)

    assert rolling_risk_series(returns, 70).size == 367
    full = rolling_risk_series(returns, 436, 1)
    assert full.size == 1
    assert full[0] == pytest.approx(np.std(returns, ddof=1), rel=1e-12)
    np.testing.assert_array_equal(rolling_risk_series(np.full(20, 0.3), 5), np.zeros(16))
    mixed = rolling_risk_series(np.r_[np.full(10, 0.3), 0.1, 0.2], 5)
    np.testing.assert_array_equal(mixed[:6], np.zeros(6))
    assert np.all(mixed[6:] > 0)

    with pytest.raises(ValidationError):
        rolling_risk_series(returns, 437)


def test_backtest_preconditions(daily_panel, wrap_returns):
    with pytest.raises(UsageError):
        rolling_backtest(demean(daily_panel), BacktestConfig(window=300))
    with pytest.raises(ValidationError):
        rolling_backtest(daily_panel.window(0, 300), BacktestConfig(window=300))

    flat = daily_panel.returns.copy()
    flat[2, 100:200] = 0.0
    with pytest.raises(BacktestError) as err:
        rolling_backtest(wrap_returns(flat), BacktestConfig(window=50, hold=50,
                                                            estimator='scm'))
    assert err.value.window_start == 100


@pytest.mark.parametrize('kwargs', [{'window': 1}, {'window': 10, 'hold': 0},
                                    {'window': 10, 'estimator': 'lw'},
                                    {'window': 10, 'estimator': 'st_fixed'},
                                    {'window': 10, 'annualization_days': 0}])
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        BacktestConfig(**kwargs)


def test_window_sweep_rows(daily_panel):
    sweep = window_sweep(daily_panel, [240, 280, 320], BacktestConfig(window=300,
                                                                      estimator='scm'))

    assert list(sweep.window) == [240, 280, 320]
    assert set(sweep.estimator) == {'scm'}
    assert np.all(sweep.risk > 0)


def test_lowest_risk_share():
    shares = lowest_risk_share({'a': [1.0, 3.0, 2.0, 2.0],
                                'b': [2.0, 1.0, 2.0, 5.0]})

    assert shares == {'a': 0.75, 'b': 0.25}
    assert sum(shares.values()) == pytest.approx(1.0)

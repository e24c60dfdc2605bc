# -*- coding: utf-8 -*-

import json

import numpy as np
import pandas as pd
import pytest

from gmvp_shrinkage import risk_calibration
from gmvp_shrinkage.errors import DegenerateDataError, SolverError
from gmvp_shrinkage.estimators import (SolverOptions, checked_samples,
                                       normalized_scatter, sample_covariance,
                                       tyler_shrinkage)
from gmvp_shrinkage.portfolio_risk import (gmvp_weights, realized_risk,
                                           uniform_portfolio)
from gmvp_shrinkage.risk_calibration import (GridPoint, RiskCurve, build_optimized_portfolio,
                                             curve_from_points, gamma_hat_sc, optimize_rho,
                                             oracle_rho, risk_grid, scaled_risk_estimate,
                                             sweep_grid)
from gmvp_shrinkage.synthetic import one_factor_covariance

from tests.conftest import ONE_FACTOR_PARAMS, student_panel, two_atom_covariance


def _literal_scaled_risk(panel, est):
    """The un-cancelled closed form, valid for rho < 1."""
    (rho, c_N) = (est.rho, est.N / est.n)
    inv_ones = np.linalg.solve(est.matrix, np.ones(est.N))
    numerator = inv_ones @ (est.matrix - rho * np.eye(est.N)) @ inv_ones

    return (gamma_hat_sc(panel, est) / ((1 - rho) - (1 - rho) ** 2 * c_N) *
            numerator / inv_ones.sum() ** 2)


def test_gamma_hat_is_one_at_rho_one(make_panel):
    panel = make_panel(12, 30, 4)

    assert gamma_hat_sc(panel, tyler_shrinkage(panel, 1.0)) == 1.0


def test_gamma_hat_consistent_for_identity_covariance(make_panel):
    panel = make_panel(100, 300, 77)
    value = gamma_hat_sc(panel, tyler_shrinkage(panel, 0.5))

    assert value > 0
    assert value == pytest.approx(1.0, abs=0.1)


def test_cancelled_form_matches_literal_form(make_panel):
    panel = make_panel(15, 40, 6)
    est = tyler_shrinkage(panel, 0.5, SolverOptions(tolerance=1e-13))

    assert scaled_risk_estimate(panel, est) == pytest.approx(
        _literal_scaled_risk(panel, est), rel=1e-10)


def test_rho_one_limit(make_panel):
    panel = make_panel(10, 25, 12)
    est = tyler_shrinkage(panel, 1.0)

    (samples, norms) = checked_samples(panel)
    scatter = normalized_scatter(samples, norms, np.eye(10))
    expected = scatter.sum() / 10 ** 2

    assert scaled_risk_estimate(panel, est) == pytest.approx(expected, rel=1e-12)

    near = tyler_shrinkage(panel, 1 - 1e-6, SolverOptions(tolerance=1e-13))
    assert _literal_scaled_risk(panel, near) == pytest.approx(expected, rel=1e-4)


def test_risk_grid_bounds():
    grid = risk_grid(200, 100, 50, 0.01)

    assert grid.size == 50
    assert grid[0] == pytest.approx(0.51)
    assert grid[-1] == 1.0
    assert np.all(np.diff(grid) > 0)


def test_argmin_of_two_points_and_ties():
    points = [GridPoint(0.5, 1.0, 1.0, np.nan, 3), GridPoint(1.0, 2.0, 1.0, np.nan, 1)]
    assert curve_from_points(points).rho_star == 0.5

    tied = [GridPoint(0.2, 1.0, 1.0, np.nan, 3), GridPoint(0.6, 1.0, 1.0, np.nan, 3),
            GridPoint(1.0, 3.0, 1.0, np.nan, 1)]
    assert curve_from_points(tied).rho_star == 0.2


def test_optimize_rho_matches_brute_force(make_panel):
    panel = make_panel(50, 100, 2718)
    curve = optimize_rho(panel, grid_size=12)

    brute = [scaled_risk_estimate(panel, tyler_shrinkage(panel, rho))
             for rho in curve.rho_grid]
    assert curve.rho_star == curve.rho_grid[int(np.argmin(brute))]
    np.testing.assert_allclose(curve.sigma_sc, brute, rtol=1e-12)
    assert np.all(curve.sigma_sc > 0)


def test_curve_is_scale_invariant(make_panel, wrap_returns):
    panel = make_panel(20, 50, 5)
    scaled = wrap_returns(25.0 * panel.returns)

    (base, other) = (optimize_rho(panel, grid_size=8), optimize_rho(scaled, grid_size=8))
    assert base.rho_star == other.rho_star
    np.testing.assert_allclose(other.sigma_sc, base.sigma_sc, rtol=1e-8)


def test_threads_do_not_change_results(make_panel):
    panel = make_panel(15, 40, 8)
    grid = risk_grid(15, 40, 6, 0.01)

    assert (sweep_grid(panel, grid, cov_true=np.eye(15), threads=1) ==
            sweep_grid(panel, grid, cov_true=np.eye(15), threads=4))


def test_solver_failure_is_annotated_with_rho(make_panel):
    panel = make_panel(10, 30, 1)

    with pytest.raises(SolverError) as err:
        optimize_rho(panel, grid_size=4, opts=SolverOptions(max_iterations=1))

    assert err.value.rho is not None and err.value.rho < 1.0


def test_unconverged_points_can_be_skipped(make_panel, caplog):
    panel = make_panel(10, 30, 1)
    grid = risk_grid(10, 30, 4)

    with caplog.at_level('WARNING', logger='gmvp_shrinkage.risk_calibration'):
        points = sweep_grid(panel, grid, SolverOptions(max_iterations=1),
                            skip_unconverged=True)

    assert [point.rho for point in points] == list(grid)
    assert all(np.isnan(point.sigma_sc) for point in points[:-1])
    assert points[-1].sigma_sc > 0 and points[-1].iterations == 1
    assert curve_from_points(points).rho_star == 1.0
    assert 'did not converge' in caplog.text


def test_grid_points_below_rank_floor_are_skipped(make_panel, caplog):
    ## rank 9 of 20 puts the floor at 0.55, above the left grid end 0.51.
    panel = make_panel(20, 10, 4)

    with caplog.at_level('WARNING', logger='gmvp_shrinkage.risk_calibration'):
        curve = optimize_rho(panel, grid_size=5)

    assert curve.rho_grid[0] == pytest.approx(0.51)
    assert np.isnan(curve.sigma_sc[0])
    assert np.all(np.isfinite(curve.sigma_sc[1:]))
    assert curve.rho_star > 0.55
    assert 'Skipping rho=0.51' in caplog.text
    assert curve.to_dict()['sigma_sc'][0] is None


def test_curve_from_points_ignores_missing_values():
    points = [GridPoint(0.5, np.nan, np.nan, np.nan, 0),
              GridPoint(0.75, 2.0, 1.1, np.nan, 7),
              GridPoint(1.0, 3.0, 1.0, np.nan, 1)]
    assert curve_from_points(points).rho_star == 0.75

    with pytest.raises(DegenerateDataError):
        curve_from_points([GridPoint(0.5, np.nan, np.nan, np.nan, 0),
                           GridPoint(1.0, np.nan, np.nan, np.nan, 0)])
    with pytest.raises(DegenerateDataError):
        curve_from_points([GridPoint(0.5, np.inf, 1.0, np.nan, 3),
                           GridPoint(1.0, 1.0, 1.0, np.nan, 1)])


def test_build_optimized_portfolio(make_panel):
    panel = make_panel(20, 60, 3)
    (curve, est, portfolio) = build_optimized_portfolio(panel, grid_size=8)

    assert est.rho == curve.rho_star
    assert portfolio.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert curve.gamma_sc_at_star == pytest.approx(gamma_hat_sc(panel, est), rel=1e-12)
    assert curve.metadata['grid_size'] == 8


def test_forced_rho_one_gives_uniform_weights(make_panel, monkeypatch):
    panel = make_panel(9, 30, 3)
    forced = RiskCurve([0.5, 1.0], [2.0, 1.0], 1.0)
    monkeypatch.setattr(risk_calibration, 'optimize_rho', lambda *args, **kwargs: forced)

    (_, _, portfolio) = build_optimized_portfolio(panel)
    np.testing.assert_array_equal(portfolio.weights,
                                  uniform_portfolio(panel.asset_ids).weights)


def test_oracle_curve_uses_true_risk():
    cov = one_factor_covariance(20, **ONE_FACTOR_PARAMS)
    panel = student_panel(20, 40, 9, cov)
    curve = oracle_rho(panel, cov, grid_size=6)

    assert curve.criterion == 'realized_risk'
    est = tyler_shrinkage(panel, curve.rho_star)
    assert curve.sigma_sc[curve.star_index] == pytest.approx(
        realized_risk(gmvp_weights(est.matrix), cov), rel=1e-12)


def test_risk_curve_serialization(tmp_path, make_panel):
    curve = optimize_rho(make_panel(8, 30, 2), grid_size=5)

    frame = pd.read_csv(curve.to_csv(tmp_path / 'curve.csv'))
    assert list(frame.columns) == ['rho', 'sigma_sc']
    assert len(frame) == 5

    with open(curve.to_json(tmp_path / 'curve.json'), encoding='utf-8') as in_fh:
        payload = json.load(in_fh)
    assert payload['rho_star'] == curve.rho_star
    assert payload['metadata']['N'] == 8


def _kappa(cov):
    return np.trace(cov) / cov.shape[0]


def _scaled_and_realized(N, n, grid, seeds, cov):
    """kappa * sigma_sc^2 and realized risk, one row per seed, one column per rho."""
    (estimated, realized) = ([], [])
    for seed in seeds:
        points = sweep_grid(student_panel(N, n, seed, cov), grid, cov_true=cov)
        estimated.append([_kappa(cov) * point.sigma_sc for point in points])
        realized.append([point.realized_risk for point in points])

    return (np.array(estimated), np.array(realized))


@pytest.mark.slow
def test_scaled_risk_tracks_realized_risk():
    cov = two_atom_covariance(100)
    grid = risk_grid(100, 200, 8)
    (estimated, realized) = _scaled_and_realized(100, 200, grid, range(50), cov)

    np.testing.assert_allclose(estimated.mean(axis=0), realized.mean(axis=0), rtol=0.10)


@pytest.mark.slow
def test_scaled_risk_error_shrinks_with_dimension():
    errors = {}
    for N in (50, 200):
        cov = two_atom_covariance(N)
        (estimated, realized) = _scaled_and_realized(N, 2 * N, risk_grid(N, 2 * N, 5),
                                                     range(300, 350), cov)
        errors[N] = np.median(np.max(np.abs(estimated - realized), axis=1)) / _kappa(cov)

    assert errors[200] < errors[50]


@pytest.mark.slow
def test_one_factor_spike_biases_scaled_risk_upward():
    ## The factor eigenvalue grows with N, so the estimate runs high here.
    cov = one_factor_covariance(100, **ONE_FACTOR_PARAMS)
    (estimated, realized) = _scaled_and_realized(100, 200, [0.6], range(50), cov)

    assert 1.0 < np.mean(estimated) / np.mean(realized) < 1.35


@pytest.mark.slow
def test_calibrated_rho_is_near_risk_optimal():
    cov = one_factor_covariance(100, **ONE_FACTOR_PARAMS)
    hits = 0
    for seed in range(100):
        panel = student_panel(100, 200, 500 + seed, cov)
        points = sweep_grid(panel, risk_grid(100, 200, 20), cov_true=cov)
        calibrated = curve_from_points(points)
        best = min(point.realized_risk for point in points)
        hits += points[calibrated.star_index].realized_risk <= 1.05 * best

    assert hits >= 95


@pytest.mark.slow
def test_calibrated_portfolio_beats_sample_covariance():
    cov = one_factor_covariance(100, **ONE_FACTOR_PARAMS)
    (shrunk, scm) = ([], [])
    for seed in range(100):
        panel = student_panel(100, 150, 900 + seed, cov)
        (_, _, portfolio) = build_optimized_portfolio(panel, grid_size=20)
        shrunk.append(realized_risk(portfolio, cov))
        scm.append(realized_risk(gmvp_weights(sample_covariance(panel)), cov))

    assert np.mean(shrunk) <= np.mean(scm)

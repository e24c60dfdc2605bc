# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.tasks.simulate
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Monte-Carlo study of realized GMVP risk against the sample count n for a
one-factor population covariance and elliptical returns.

For every n and repetition a panel is drawn with its own derived seed, the
rho grid is swept once, and the realized risk under the true covariance is
recorded for each estimator. Two tables are written:

    risk_vs_n.csv   n, estimator, mean_realized_risk
    rho_vs_n.csv    n, mean_rho, mean_rho_oracle
"""

import logging
import os

from dataclasses import dataclass

import numpy as np
import pandas as pd

from tqdm import tqdm

from gmvp_shrinkage.deterministic_equivalent import risk_deterministic_equivalent
from gmvp_shrinkage.errors import NumericError, ValidationError
from gmvp_shrinkage.estimators import SolverOptions, sample_covariance
from gmvp_shrinkage.portfolio_risk import (gmvp_weights, realized_risk,
                                           theoretical_risk, uniform_portfolio)
from gmvp_shrinkage.risk_calibration import curve_from_points, risk_grid, sweep_grid
from gmvp_shrinkage.synthetic import (EllipticalSpec, TauLaw, one_factor_covariance,
                                      sample_elliptical)
from gmvp_shrinkage.tasks import common
from gmvp_shrinkage.utils.misc import derive_seed, fan_out

logger = logging.getLogger(__name__)

SAMPLED_ESTIMATORS = ('st_optimized', 'st_oracle', 'scm', 'identity')
REFERENCE_CURVES = ('theoretical_bound', 'deterministic_equivalent')


@dataclass(frozen=True)
class SimulationPlan:
    """Validated parameters of a simulate run."""

    N: int
    n_values: tuple
    repetitions: int
    tau_law: TauLaw
    covariance: dict
    estimators: tuple
    grid_size: int
    epsilon: float
    solver: SolverOptions
    progress: bool = False

    @property
    def reported(self):
        return self.estimators + REFERENCE_CURVES


def plan_simulation(spec):
    """Checks a simulate spec against every module precondition.

    Args:
        spec (ExperimentSpec): Resolved simulate spec.

    Requires:
        None

    Returns:
        SimulationPlan: The validated plan; nothing has been computed yet.
    """
    params = spec.params

    try:
        tau_law = TauLaw(**params['tau_law'])
    except TypeError as err:
        raise ValidationError('Bad tau_law block', params['tau_law']) from err

    estimators = tuple(params['estimators'])
    unknown = [name for name in estimators if name not in SAMPLED_ESTIMATORS]
    if unknown or not estimators:
        raise ValidationError('Unknown simulate estimators', unknown or estimators)

    N = params['N']
    n_values = tuple(int(n) for n in params['n_values'])
    if not n_values or len(set(n_values)) != len(n_values):
        raise ValidationError('n_values must be non-empty and distinct', n_values)
    for n in n_values:
        risk_grid(N, n, params['grid_size'], params['epsilon'])

    repetitions = params['repetitions']
    if int(repetitions) != repetitions or repetitions < 1:
        raise ValidationError('repetitions must be a positive integer', repetitions)

    covariance = dict(params['covariance'])
    one_factor_covariance(N, **covariance)

    return SimulationPlan(int(N), n_values, int(repetitions), tau_law, covariance,
                          estimators, int(params['grid_size']), float(params['epsilon']),
                          spec.solver_options(), bool(params.get('progress', False)))


def _scm_risk(panel, cov_true):
    try:
        return realized_risk(gmvp_weights(sample_covariance(panel)), cov_true)
    except NumericError as err:
        logger.warning('Skipping scm at N=%s n=%s: %s', panel.N, panel.n, err.args[0])
        return np.nan


def simulate_repetition(plan, cov_true, n, seed, threads=1):
    """Realized risks and selected intensities of one seeded repetition.

    Returns:
        dict: Realized risk per sampled estimator and reference curve, plus
            'rho' (calibrated) and 'rho_oracle'.
    """
    panel = sample_elliptical(EllipticalSpec(cov_true, n, seed, plan.tau_law))

    grid = risk_grid(plan.N, n, plan.grid_size, plan.epsilon)
    points = sweep_grid(panel, grid, plan.solver, cov_true=cov_true, threads=threads,
                        skip_unconverged=True)
    calibrated = curve_from_points(points, 'sigma_sc')
    oracle = curve_from_points(points, 'realized_risk')

    try:
        equivalent = risk_deterministic_equivalent(cov_true, calibrated.rho_star,
                                                   panel.c_N)
    except NumericError as err:
        logger.warning('No deterministic equivalent at n=%s rho=%.4f: %s', n,
                       calibrated.rho_star, err)
        equivalent = np.nan

    risks = {'st_optimized': points[calibrated.star_index].realized_risk,
             'st_oracle': points[oracle.star_index].realized_risk,
             'scm': _scm_risk(panel, cov_true),
             'identity': realized_risk(uniform_portfolio(panel.asset_ids), cov_true),
             'deterministic_equivalent': equivalent}

    risks.update(rho=calibrated.rho_star, rho_oracle=oracle.rho_star)
    return risks


def summarize(plan, records, bound):
    """Averages repetition records into the two output tables."""
    records_df = pd.DataFrame(records)
    means = records_df.groupby('n').mean(numeric_only=True)

    risk_rows = []
    for n in plan.n_values:
        for estimator in plan.reported:
            value = bound if estimator == 'theoretical_bound' else means.at[n, estimator]
            risk_rows.append({'n': n, 'estimator': estimator,
                              'mean_realized_risk': float(value)})

    rho_df = pd.DataFrame({'n': list(plan.n_values),
                           'mean_rho': [means.at[n, 'rho'] for n in plan.n_values],
                           'mean_rho_oracle': [means.at[n, 'rho_oracle']
                                               for n in plan.n_values]})

    return (pd.DataFrame(risk_rows, columns=['n', 'estimator', 'mean_realized_risk']),
            rho_df)


def run_simulate(spec, output_dir):
    """Runs the Monte-Carlo sweep and writes risk_vs_n.csv and rho_vs_n.csv.

    Repetition r at sample count n draws from seed derive_seed(seed, n, r), so
    results do not depend on ``threads`` or on which n values are swept.

    Args:
        spec (ExperimentSpec): Resolved simulate spec.
        output_dir (string): Directory receiving the output files.

    Requires:
        None

    Returns:
        list: Paths of the written files.

    Example:
        from gmvp_shrinkage.tasks.common import resolve_spec, run_task
        from gmvp_shrinkage.tasks.simulate import run_simulate

        run_task(run_simulate, resolve_spec('simulate', out_dir='/tmp/sim'))
    """
    plan = plan_simulation(spec)
    cov_true = one_factor_covariance(plan.N, **plan.covariance)
    bound = theoretical_risk(cov_true)

    jobs = [(n, rep) for n in plan.n_values for rep in range(plan.repetitions)]
    grid_threads = 1 if spec.threads > 1 and len(jobs) > 1 else spec.threads

    with tqdm(total=len(jobs), desc='simulate', disable=not plan.progress) as pbar:
        def _run(job):
            (n, rep) = job
            record = simulate_repetition(plan, cov_true, n,
                                         derive_seed(spec.seed, n, rep), grid_threads)
            pbar.update(1)
            return dict(record, n=n, rep=rep)

        records = fan_out(_run, jobs, spec.threads)

    (risk_df, rho_df) = summarize(plan, records, bound)
    for n in plan.n_values:
        logger.info('n=%s: mean rho=%.4f', n, rho_df.loc[rho_df.n == n, 'mean_rho'].iloc[0])

    return [common.write_csv_with_spec(risk_df, os.path.join(output_dir, 'risk_vs_n.csv'),
                                       spec),
            common.write_csv_with_spec(rho_df, os.path.join(output_dir, 'rho_vs_n.csv'),
                                       spec)]

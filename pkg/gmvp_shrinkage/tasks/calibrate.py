# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.tasks.calibrate
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Calibrates the shrinkage intensity on a price file and writes the risk
curve together with the resulting GMVP weights.
"""

import logging
import os

import pandas as pd

from gmvp_shrinkage.data_model import load_price_csv, log_returns
from gmvp_shrinkage.risk_calibration import build_optimized_portfolio, risk_grid
from gmvp_shrinkage.tasks import common

logger = logging.getLogger(__name__)


def run_calibrate(spec, output_dir):
    """Writes risk_curve.csv, risk_curve.json and weights.csv.

    Args:
        spec (ExperimentSpec): Resolved calibrate spec naming ``prices``.
        output_dir (string): Directory receiving the output files.

    Requires:
        None

    Returns:
        list: Paths of the written files.
    """
    params = spec.params
    prices_file = common.required_path(params, 'prices')
    opts = spec.solver_options()

    panel = log_returns(load_price_csv(prices_file))
    risk_grid(panel.N, panel.n, params['grid_size'], params['epsilon'])

    (curve, est, portfolio) = build_optimized_portfolio(panel, params['grid_size'],
                                                        params['epsilon'], opts,
                                                        spec.threads)
    logger.info('Calibrated rho=%.4f on %s assets x %s returns (%s iterations)',
                curve.rho_star, panel.N, panel.n, est.iterations)

    weights_df = pd.DataFrame({'asset_id': list(portfolio.asset_ids),
                               'weight': portfolio.weights})
    payload = dict(curve.to_dict(), iterations=est.iterations, residual=est.residual)

    return [common.write_csv_with_spec(curve.to_frame(),
                                       os.path.join(output_dir, 'risk_curve.csv'), spec),
            common.write_json_with_spec(payload,
                                        os.path.join(output_dir, 'risk_curve.json'), spec),
            common.write_csv_with_spec(weights_df,
                                       os.path.join(output_dir, 'weights.csv'), spec)]

# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.tasks.boottest
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Equal-variance bootstrap test between two out-of-sample return files, run
once per configured block length.
"""

import logging
import os

import pandas as pd

from gmvp_shrinkage.errors import ValidationError
from gmvp_shrinkage.inference import variance_difference_test
from gmvp_shrinkage.tasks import common

logger = logging.getLogger(__name__)

DEFAULT_RETURN_COLUMN = 'oos_return'


def read_return_series(path, column=None):
    """Reads one return column from a CSV written by this package or by hand.

    When ``column`` is not given, 'oos_return' is used if present; otherwise
    the file must hold exactly one column besides an optional 'date'.

    Args:
        path (string): Path to the CSV file; '#' lines are skipped.
        column (string): Name of the return column.

    Requires:
        None

    Returns:
        numpy.ndarray: The returns in file order.
    """
    if not os.path.exists(path):
        raise OSError(2, 'Return file does not exist', path)

    returns_df = pd.read_csv(path, comment='#')
    if column is None:
        candidates = [name for name in returns_df.columns if name != 'date']
        if DEFAULT_RETURN_COLUMN in candidates:
            column = DEFAULT_RETURN_COLUMN
        elif len(candidates) == 1:
            column = candidates[0]
        else:
            raise ValidationError('Return file holds several columns; name one',
                                  path, candidates)

    if column not in returns_df.columns:
        raise ValidationError('Column not found in return file', path, column)

    values = pd.to_numeric(returns_df[column], errors='coerce')
    if values.isna().any():
        raise ValidationError('Missing or non-numeric returns', path, column)

    return values.to_numpy(dtype=float)


def run_boottest(spec, output_dir):
    """Writes boottest.json with one BootstrapTest per block length.

    Args:
        spec (ExperimentSpec): Resolved boottest spec with ``returns_a`` and
            ``returns_b`` blocks (path and optional column).
        output_dir (string): Directory receiving the output file.

    Requires:
        None

    Returns:
        list: Paths of the written files.

    Example:
        from gmvp_shrinkage.tasks.boottest import run_boottest
        from gmvp_shrinkage.tasks.common import resolve_spec, run_task

        run_task(run_boottest, resolve_spec('boottest', 'compare.yaml', '/tmp/bt'))
    """
    params = spec.params
    block_lengths = [int(b) for b in params['block_lengths']]
    if not block_lengths:
        raise ValidationError('block_lengths must be non-empty')

    series = []
    for key in ('returns_a', 'returns_b'):
        source = params[key] or {}
        path = common.required_path(source, 'path', key)
        series.append(read_return_series(path, source.get('column')))

    reports = []
    for block_length in block_lengths:
        report = variance_difference_test(series[0], series[1], block_length,
                                          params['iterations'], spec.seed)
        logger.info('b=%s: T=%.4f p=%.4f %s', block_length, report.statistic,
                    report.p_value, report.stars)
        reports.append(dict(report.to_dict(), stars=report.stars))

    payload = {'n_returns': int(series[0].size), 'reports': reports}
    return [common.write_json_with_spec(payload,
                                        os.path.join(output_dir, 'boottest.json'), spec)]

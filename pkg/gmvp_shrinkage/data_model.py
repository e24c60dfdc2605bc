# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.data_model
~~~~~~~~~~~~~~~~~~~~~~~~~

Price and return panels shared by every other module, together with the
price-to-return transformation, demeaning and the admissible shrinkage
interval.

Panels are stored asset-major: row i holds asset i, column t holds period t.

Copyright (c) 2026 gmvp_shrinkage developers

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the conditions stated in the LICENSE file.
"""

import logging
import os

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from gmvp_shrinkage.errors import ParseError, UsageError, ValidationError

logger = logging.getLogger(__name__)

DATE_COLUMN = 'date'


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PricePanel:
    """Positive prices of N assets over L+1 dates."""

    prices: np.ndarray
    asset_ids: tuple
    dates: tuple

    def __post_init__(self):
        prices = _frozen_array(self.prices)
        object.__setattr__(self, 'prices', prices)
        object.__setattr__(self, 'asset_ids', tuple(self.asset_ids))
        object.__setattr__(self, 'dates', tuple(pd.Timestamp(d) for d in self.dates))

        if prices.ndim != 2:
            raise ValidationError('Prices must be a 2-D asset x date matrix', prices.shape)
        (n_assets, n_dates) = prices.shape
        if n_assets < 2 or n_dates < 2:
            raise ValidationError('Need at least 2 assets and 2 dates', prices.shape)
        if len(self.asset_ids) != n_assets or len(set(self.asset_ids)) != n_assets:
            raise ValidationError('Asset labels must be distinct and match rows',
                                  self.asset_ids)
        if len(self.dates) != n_dates:
            raise ValidationError('Date count does not match columns', len(self.dates))
        if any(a >= b for (a, b) in zip(self.dates, self.dates[1:])):
            raise ValidationError('Dates must be strictly increasing')
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise ValidationError('Prices must be finite and strictly positive')

    @property
    def N(self):
        return self.prices.shape[0]

    @property
    def L(self):
        return self.prices.shape[1] - 1


@dataclass(frozen=True)
class ReturnPanel:
    """Log returns of N assets over n periods.

    The ``demeaned`` flag tags panels whose rows have had their across-time
    mean removed; estimators that need the centered samples demean untagged
    panels themselves.
    """

    returns: np.ndarray
    asset_ids: tuple
    dates: tuple
    demeaned: bool = False

    def __post_init__(self):
        returns = _frozen_array(self.returns)
        object.__setattr__(self, 'returns', returns)
        object.__setattr__(self, 'asset_ids', tuple(self.asset_ids))
        object.__setattr__(self, 'dates', tuple(self.dates))

        if returns.ndim != 2:
            raise ValidationError('Returns must be a 2-D asset x period matrix',
                                  returns.shape)
        if returns.shape[1] < 2:
            raise ValidationError('Need at least 2 return periods', returns.shape)
        if len(self.asset_ids) != returns.shape[0]:
            raise ValidationError('Asset labels do not match rows', self.asset_ids)
        if len(self.dates) != returns.shape[1]:
            raise ValidationError('Date count does not match columns', len(self.dates))
        if not np.all(np.isfinite(returns)):
            raise ValidationError('Returns must be finite')

        if self.demeaned:
            n = returns.shape[1]
            row_sums = np.abs(returns.sum(axis=1))
            bound = 1e-10 * n * np.abs(returns).max(axis=1)
            if np.any(row_sums > bound):
                raise ValidationError('Panel tagged demeaned has non-zero row means')

    @property
    def N(self):
        return self.returns.shape[0]

    @property
    def n(self):
        return self.returns.shape[1]

    @property
    def c_N(self):
        """Aspect ratio N/n used wherever the limit ratio c is needed."""
        return self.N / self.n

    def window(self, start, stop):
        """Returns the untagged sub-panel holding periods [start, stop)."""
        if self.demeaned:
            raise UsageError('Cannot window a demeaned panel')
        return ReturnPanel(self.returns[:, start:stop], self.asset_ids,
                           self.dates[start:stop])

    def centered(self):
        """Demeaned samples as an N x n array, demeaning if needed."""
        if self.demeaned:
            return self.returns
        return demean(self).returns

    def to_frame(self):
        """Date-indexed DataFrame with one column per asset."""
        return pd.DataFrame(self.returns.T, index=pd.Index(self.dates, name=DATE_COLUMN),
                            columns=list(self.asset_ids))


def load_price_csv(path):
    """Reads a wide, date-first price CSV into a PricePanel.

    The header must be ``date,<id1>,...,<idN>``. Rows may appear in any date
    order; they are sorted ascending.

    Args:
        path (string): Path to the price CSV file.

    Requires:
        None

    Returns:
        PricePanel: The validated price panel.

    Example:
        from gmvp_shrinkage.data_model import load_price_csv, log_returns

        panel = log_returns(load_price_csv('/tmp/hsi_prices.csv'))
    """
    if not os.path.exists(path):
        raise OSError(2, 'Price CSV file does not exist', path)

    raw_df = pd.read_csv(path, dtype=str, keep_default_na=False, comment='#',
                         encoding='utf-8')
    if raw_df.shape[1] < 3:
        raise ValidationError('Price CSV needs a date column and at least 2 assets',
                              path)

    asset_ids = list(raw_df.columns[1:])
    if len(set(asset_ids)) != len(asset_ids):
        raise ValidationError('Duplicate asset columns in header', path)

    ## Header is line 1 so data row i sits on file line i + 2.
    for (col_idx, asset_id) in enumerate(asset_ids, start=1):
        cells = raw_df.iloc[:, col_idx].str.strip()
        values = pd.to_numeric(cells, errors='coerce')
        bad_rows = np.flatnonzero(values.isna().to_numpy() | (values <= 0).to_numpy())
        if bad_rows.size:
            row = int(bad_rows[0])
            raise ParseError('Missing, non-numeric or non-positive price',
                             row + 2, asset_id, cells.iloc[row])

    try:
        dates = pd.to_datetime(raw_df.iloc[:, 0].str.strip(), format='ISO8601')
    except (ValueError, TypeError) as err:
        raise ParseError('Unparseable date', 0, raw_df.columns[0]) from err

    if dates.duplicated().any():
        raise ValidationError('Duplicate dates in price CSV',
                              list(dates[dates.duplicated()].astype(str)))

    price_df = raw_df.iloc[:, 1:].apply(pd.to_numeric)
    price_df.index = dates
    price_df = price_df.sort_index()

    logger.debug('Loaded %s assets x %s dates from %s', price_df.shape[1],
                 price_df.shape[0], path)

    return PricePanel(price_df.to_numpy().T, asset_ids, list(price_df.index))


def write_price_csv(panel, path):
    """Writes a PricePanel in the schema read by load_price_csv."""
    price_df = pd.DataFrame(panel.prices.T, columns=list(panel.asset_ids))
    price_df.insert(0, DATE_COLUMN, [d.strftime('%Y-%m-%d') for d in panel.dates])
    price_df.to_csv(path, index=False, float_format='%.12g')

    return path


def log_returns(panel):
    """Continuously compounded returns ln(p[t+1] / p[t]) of every asset.

    The return for period t is stamped with the later of its two price dates.
    """
    returns = np.log(panel.prices[:, 1:] / panel.prices[:, :-1])
    return ReturnPanel(returns, panel.asset_ids, panel.dates[1:], demeaned=False)


def prices_from_returns(panel, initial=1.0, start_date=None):
    """Inverse of log_returns: compounds a return panel into prices.

    Args:
        panel (ReturnPanel): Untagged return panel.
        initial (float): Common starting price of every asset.
        start_date: Date stamp of the initial price. Defaults to one business
            day before the first return date.

    Returns:
        PricePanel: Prices over n + 1 dates.
    """
    if panel.demeaned:
        raise UsageError('Demeaned panels are not price paths')

    first = pd.Timestamp(panel.dates[0])
    if start_date is None:
        start_date = first - pd.offsets.BDay(1)

    log_prices = np.cumsum(panel.returns, axis=1)
    prices = initial * np.exp(np.hstack([np.zeros((panel.N, 1)), log_prices]))

    return PricePanel(prices, panel.asset_ids, [start_date] + list(panel.dates))


def demean(panel):
    """Removes the across-time sample mean from every sample.

    Args:
        panel (ReturnPanel): An untagged return panel.

    Requires:
        None

    Returns:
        ReturnPanel: The centered panel, tagged ``demeaned=True``.
    """
    if panel.demeaned:
        raise UsageError('Panel is already demeaned')

    centered = panel.returns - panel.returns.mean(axis=1, keepdims=True)
    return replace(panel, returns=centered, demeaned=True)


def admissible_rho_range(N, n, epsilon):
    """Closed interval of shrinkage intensities [eps + max(0, 1 - n/N), 1].

    Args:
        N (int): Number of assets.
        n (int): Number of samples.
        epsilon (float): Margin kept away from the open lower endpoint.

    Returns:
        tuple: (lower, upper) with upper always 1.0.

    Example:
        admissible_rho_range(200, 100, 0.01)
        # (0.51, 1.0)
    """
    if N < 2 or n < 2:
        raise ValidationError('Need N >= 2 and n >= 2', (N, n))
    if not 0 < epsilon < 1:
        raise ValidationError('epsilon must lie in (0, 1)', epsilon)

    lower = epsilon + max(0.0, 1.0 - n / N)
    if lower >= 1.0:
        raise ValidationError('Admissible shrinkage interval is empty', (N, n, epsilon))

    return (lower, 1.0)


def open_lower_bound(N, n):
    """The excluded left endpoint max(0, 1 - n/N) of the shrinkage domain."""
    return max(0.0, 1.0 - n / N)

# -*- coding: utf-8 -*-

import json

import numpy as np
import pytest

from gmvp_shrinkage.errors import DegenerateDataError, ValidationError
from gmvp_shrinkage.inference import (BootstrapTest, circular_block_indices,
                                      significance_stars, variance_difference_test)


@pytest.fixture
def returns():
    return 0.01 * np.random.default_rng(436).standard_normal(436)


def test_identical_series(returns):
    report = variance_difference_test(returns, returns.copy(), 5, 500, 1)

    assert report.statistic == 0.0
    assert report.p_value == 1.0
    assert report.stars == ''


def test_hundredfold_variance_is_rejected(returns):
    report = variance_difference_test(returns, 10.0 * returns, 5, 2000, 7)

    assert report.statistic == pytest.approx(-np.log(100.0), rel=1e-12)
    assert report.p_value < 0.01
    assert report.stars == '**'


def test_common_rescaling_leaves_p_value_unchanged(returns):
    other = 0.012 * np.random.default_rng(5).standard_normal(436)
    base = variance_difference_test(returns, other, 5, 1000, 3)
    scaled = variance_difference_test(4.0 * returns, 4.0 * other, 5, 1000, 3)

    assert scaled.p_value == base.p_value
    assert scaled.statistic == pytest.approx(base.statistic, abs=1e-12)


def test_same_seed_same_report(returns):
    other = np.roll(returns, 3) * 1.1
    first = variance_difference_test(returns, other, 10, 300, 99)

    assert variance_difference_test(returns, other, 10, 300, 99) == first
    assert 0.0 <= first.p_value <= 1.0
    assert first.bootstrap_sd > 0


def test_invalid_inputs(returns):
    with pytest.raises(DegenerateDataError):
        variance_difference_test(np.full(50, 0.01), returns[:50])
    with pytest.raises(ValidationError):
        variance_difference_test(returns, returns[:-1])
    with pytest.raises(ValidationError):
        variance_difference_test(returns[:9], returns[:9], block_length=5)
    with pytest.raises(ValidationError):
        variance_difference_test(returns, returns, iterations=0)


def test_circular_block_indices_wrap():
    rng = np.random.default_rng(0)
    idx = circular_block_indices(23, 5, rng)

    assert idx.size == 23
    assert idx.min() >= 0 and idx.max() < 23
    for block in range(4):
        chunk = idx[5 * block:5 * block + 5]
        np.testing.assert_array_equal(np.diff(chunk) % 23, np.ones(4))


def test_significance_stars():
    assert [significance_stars(p) for p in (0.001, 0.0099, 0.01, 0.049, 0.05, 0.5)] == \
        ['**', '**', '*', '*', '', '']


def test_report_json(tmp_path, returns):
    report = variance_difference_test(returns, returns * 1.5, 5, 200, 0)
    with open(report.to_json(tmp_path / 'test.json'), encoding='utf-8') as in_fh:
        payload = json.load(in_fh)

    assert payload['block_length'] == 5
    assert payload['iterations'] == 200
    assert payload['seed'] == 0

    with pytest.raises(ValidationError):
        BootstrapTest(0.0, 1.5, 5, 10, 0)


def _null_rejection_rate(block_length, trials=200, iterations=500):
    rejections = 0
    for trial in range(trials):
        rng = np.random.default_rng(10_000 + trial)
        (r_a, r_b) = rng.standard_normal((2, 436))
        report = variance_difference_test(r_a, r_b, block_length, iterations, trial)
        rejections += report.p_value < 0.05

    return rejections / trials


@pytest.mark.slow
def test_size_and_block_length_robustness():
    rates = {b: _null_rejection_rate(b) for b in (1, 5, 10)}

    assert 0.02 <= rates[5] <= 0.09
    for a in rates:
        for b in rates:
            assert abs(rates[a] - rates[b]) <= 0.05

# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.utils.misc
~~~~~~~~~~~~~~~~~~~~~~~~~

Miscellaneous helpers shared by the experiment tasks: configuration file
parsing, seed derivation and ordered thread fan-out.
"""

import os

from concurrent.futures import ThreadPoolExecutor

import funcy
import numpy as np
import yaml

from gmvp_shrinkage.errors import ValidationError


def parse_cfg_file(config_file, section=None):
    """Parses a YAML (or JSON) configuration file.

    When ``section`` is given only that block is returned; YAML anchors such
    as ``<<: *base`` are resolved by the loader.

    Args:
        config_file (string): Path to the configuration file.
        section (string): Optional top-level key to return.

    Requires:
        None

    Returns:
        dict: The parsed configuration.

    Example:
        from gmvp_shrinkage.utils.misc import parse_cfg_file

        defaults = parse_cfg_file('config/experiment.tmpl.yaml', 'backtest')
    """
    if not os.path.exists(config_file):
        raise OSError(2, 'Configuration file does not exist', config_file)

    with open(config_file, encoding='utf-8') as cfg_fh:
        try:
            config = yaml.safe_load(cfg_fh) or {}
        except yaml.YAMLError as err:
            raise ValidationError('Unparseable configuration file', config_file) from err

    if not isinstance(config, dict):
        raise ValidationError('Configuration file must hold a mapping', config_file)

    if section:
        return dict(config.get(section) or {})

    return config


def deep_merge(*configs):
    """Merges nested dictionaries; later values win, sub-dicts merge."""
    merged = {}
    for config in configs:
        for (key, value) in (config or {}).items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = deep_merge(merged[key], value)
            else:
                merged[key] = value

    return merged


def drop_none(config):
    """Removes keys whose value is None (unset command-line flags)."""
    return funcy.select_values(lambda value: value is not None, config)


def derive_seed(*keys):
    """A 64-bit seed derived from integer keys via numpy's SeedSequence."""
    seq = np.random.SeedSequence([int(key) for key in keys])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def fan_out(func, items, threads=1):
    """Maps ``func`` over ``items``, in order, on up to ``threads`` threads."""
    if threads <= 1:
        return [func(item) for item in items]

    items = list(items)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))

# -*- coding: utf-8 -*-

"""
gmvp_shrinkage
~~~~~~~~~~~~~~

Risk-calibrated shrinkage-Tyler covariance estimation for global minimum
variance portfolios, plus the simulation, backtesting and bootstrap
inference steps needed to run the accompanying experiments.
"""

__version__ = '0.1.0'

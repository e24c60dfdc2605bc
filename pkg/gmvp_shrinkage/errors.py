# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.errors
~~~~~~~~~~~~~~~~~~~~~

Exceptions raised across the gmvp_shrinkage modules. Like the workflow code
this package grew out of, the offending value is passed along as an extra
positional argument rather than being formatted into the message.
"""


class GMVPError(Exception):
    """Base class for every error raised by gmvp_shrinkage."""


class ValidationError(GMVPError, ValueError):
    """An argument or input violates a documented precondition."""


class ParseError(ValidationError):
    """A cell in an input CSV file could not be used.

    Args:
        message (string): Short description of the problem.
        row (int): 1-based line number in the source file.
        column (string): Header name of the offending column.
    """

    def __init__(self, message, row, column, value=None):
        super().__init__(message, 'row %s' % row, 'column %s' % column, value)
        self.row = row
        self.column = column
        self.value = value


class UsageError(GMVPError):
    """A transformation was applied to data already carrying its tag."""


class DegenerateDataError(GMVPError):
    """Data cannot feed an estimator (zero samples, zero variance, ...)."""


class NumericError(GMVPError, ArithmeticError):
    """A factorization, bracket or closed-form evaluation failed."""


class SolverError(GMVPError):
    """The shrinkage fixed-point iteration did not converge.

    Args:
        message (string): Short description.
        residual (float): Relative fixed-point defect of the last iterate.
        iterations (int): Number of iterations performed.
        rho (float): Shrinkage intensity being solved for, when known.
    """

    def __init__(self, message, residual, iterations, rho=None):
        super().__init__(message, residual, iterations, rho)
        self.residual = residual
        self.iterations = iterations
        self.rho = rho

    def at_rho(self, rho):
        """Returns a copy of this error annotated with the offending rho."""
        return SolverError('Fixed point did not converge at rho=%.6g' % rho,
                           self.residual, self.iterations, rho)


class BacktestError(GMVPError):
    """A rebalance window failed; carries the window start index."""

    def __init__(self, message, window_start):
        super().__init__(message, window_start)
        self.window_start = window_start


class NoFixedPointError(NumericError):
    """The shrinkage fixed point does not exist at the requested rho.

    Demeaned samples of rank r leave N - r eigenvalues of any solution at
    rho, and (1/N) tr C^-1 = 1 then forces rho > 1 - r/N.

    Args:
        message (string): Short description.
        rho (float): Requested shrinkage intensity.
        floor (float): max(0, 1 - r/N) for the panel at hand.
    """

    def __init__(self, message, rho, floor):
        super().__init__(message, rho, floor)
        self.rho = rho
        self.floor = floor

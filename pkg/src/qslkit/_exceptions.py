# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

__all__ = ('QSL_OK', 'QSL_ECONVERGE', 'QSL_EPARAM', 'QSL_EIO', 'QSL_EVERIFY',
           'QslError', 'ParameterError', 'ConvergenceError', 'PoleError',
           'VerificationError')

#
# possible error codes (they double as command-line exit codes)
#

QSL_OK        = 0  # success
QSL_ECONVERGE = 1  # numerical non-convergence
QSL_EPARAM    = 2  # invalid parameters
QSL_EIO       = 3  # input/output failure
QSL_EVERIFY   = 4  # verification check failed


class QslError(Exception):

    reason = {
        QSL_OK:        "success",
        QSL_ECONVERGE: "numerical non-convergence",
        QSL_EPARAM:    "invalid parameters",
        QSL_EIO:       "input/output failure",
        QSL_EVERIFY:   "verification failed",
    }

    default_error = QSL_EPARAM

    def __init__(self, info=None, error=None):  # noqa: D107
        self._error = self.default_error if error is None else error
        self._info  = info
        super().__init__(self.getMessage())

    def getMessage(self):
        suffix = QslError.reason.get(self._error, f"unknown error code {self._error}")
        return f"{self._info} ({suffix})" if self._info else suffix

    def getError(self):
        return self._error

    error = property(getError)


class ParameterError(QslError, ValueError):
    """Unphysical state, invalid model parameters or a malformed request."""

    default_error = QSL_EPARAM


class PoleError(QslError, ZeroDivisionError):
    """Evaluation requested exactly at (or numerically on) a pole."""

    default_error = QSL_EPARAM


class ConvergenceError(QslError, ArithmeticError):
    """A quadrature or integration did not reach its tolerance."""

    default_error = QSL_ECONVERGE

    def __init__(self, info=None, achieved=None):  # noqa: D107
        self.achieved = achieved
        if achieved is not None:
            info = f"{info}; achieved relative tolerance {achieved:.3g}"
        super().__init__(info)


class VerificationError(QslError, AssertionError):
    """A consistency check between independent computations failed."""

    default_error = QSL_EVERIFY

    def __init__(self, info=None, worst=None):  # noqa: D107
        self.worst = worst
        if worst is not None:
            info = f"{info}; worst slack {worst:.3g}"
        super().__init__(info)

"""
Exceptions raised by rmt_linstats.

Each exception keeps the human readable explanation in ``message`` so that the
command line front end and the verification suites can report it verbatim.
"""


class RmtLinstatsError(Exception):
    """Base class for errors raised by this package.

    Attributes:
        message -- explanation of the error
    """

    def __init__(self, message):
        super(RmtLinstatsError, self).__init__(message)
        self.message = message


class DomainError(RmtLinstatsError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class UnsupportedEnsembleError(DomainError):
    """The (family, beta, method) combination is not available."""


class ConfigError(DomainError):
    """A run configuration failed schema or ensemble validation."""


class NumericalError(RmtLinstatsError):
    """A computation produced a non-finite or otherwise unusable value."""


class ResolutionError(NumericalError):
    """A quadrature grid did not resolve the integrand to the requested tolerance."""

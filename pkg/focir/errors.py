"""
Exception hierarchy shared by the library, the CLI and the HTTP API.
"""


class FocirError(Exception):
    """Base class for all focir errors."""


class DomainError(FocirError, ValueError):
    """Argument outside its mathematical domain."""


class DimensionError(FocirError, ValueError):
    """Inconsistent dimensions, horizons or sequence lengths."""


class SingularStructureError(FocirError):
    """Closed-form inverse hit a degenerate denominator (boundary of the parameter domain)."""


class InconsistentCoefficientsError(FocirError):
    """Coefficients are not the image of the assumed model structure."""


class NoSolutionError(InconsistentCoefficientsError):
    """No parameter value reproduces the given coefficient."""


class NotSingleCpeStructureError(InconsistentCoefficientsError):
    """Recovered a-sequence does not satisfy the single-CPE ratio recursion."""


class UnsupportedStructureError(FocirError):
    """No inversion procedure exists for the requested structure."""


class InputError(FocirError):
    """Malformed user input (files, CSV sampling, schema)."""

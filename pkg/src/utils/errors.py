"""
Exception hierarchy shared by the numerical kernels and the CLI.

The CLI maps these onto its exit statuses: UsageError -> 1,
DomainError -> 2, ConvergenceError -> 3.
"""


class GenLameError(Exception):
    """Base class for all toolkit errors."""


class DomainError(GenLameError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(GenLameError, RuntimeError):
    """An iterative method failed to reach its tolerance within its cap."""


class UsageError(GenLameError):
    """Command-line arguments could not be parsed into a valid run."""

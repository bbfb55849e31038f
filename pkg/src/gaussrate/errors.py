"""Exception types shared across the package.

Every failure mode the library reports deliberately derives from
:class:`GaussrateError`, so callers (notably the CLI) can distinguish
library outcomes from programming errors.
"""


class GaussrateError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(GaussrateError):
    """A process specification violates its constraints (shape, symmetry,
    spectral radius, indefiniteness, unknown kind...)."""


class InvalidInput(GaussrateError):
    """Malformed user input outside of process specs: bad CSV/binary data,
    unparsable option values."""


class NotPositiveDefinite(GaussrateError):
    """A matrix required to be positive definite is not.

    ``pivot`` is the 0-based index of the failing Cholesky pivot when the
    failure came from a triangular factorization, else None.
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class BelowFloor(GaussrateError):
    """An eigenvalue fell below the configured positive-semidefinite floor."""

    def __init__(self, message: str, eigenvalue: float, floor: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.floor = floor


class DomainError(GaussrateError):
    """A scalar function was evaluated at an eigenvalue outside its domain."""


class NoConvergence(GaussrateError):
    """An iterative solver exhausted its iteration budget."""


class SizeLimit(GaussrateError):
    """A requested dense matrix would exceed the configured size cap."""


class BadAlpha(GaussrateError):
    """A Renyi order alpha is not a positive real."""


class SingularDensity(GaussrateError):
    """The spectral density is singular (eigenvalue at or below the floor)
    somewhere on the frequency grid; the entropy rate is -inf.

    Carries the offending frequency ``theta`` and the eigenvalue found there.
    """

    def __init__(self, message: str, theta: float, eigenvalue: float):
        super().__init__(message)
        self.theta = theta
        self.eigenvalue = eigenvalue


class LagOutOfRange(GaussrateError):
    """Requested autocovariance lag is not available for this series."""

"""Exception hierarchy shared across the package.

Errors of the configuration kind (bad user parameters) are kept separate
from numerical failures so the command line tool can map them to distinct
exit codes.
"""


class PetzlabError(Exception):
    """Base class for all library errors."""


class ConfigError(PetzlabError):
    """Invalid user-supplied configuration or parameters."""


class NumericsError(PetzlabError):
    """A numerical consistency check failed during computation."""


class NonSquareError(PetzlabError):
    """Matrix is not square."""


class NonHermitianError(PetzlabError):
    """Matrix is not Hermitian within tolerance."""


class NotPSDError(PetzlabError):
    """Matrix has an eigenvalue below the negative tolerance band."""


class DimensionMismatchError(PetzlabError):
    """Operands have incompatible dimensions."""


class RankTooLargeError(ConfigError):
    """Requested rank exceeds the ambient dimension."""


class OutOfRangeError(ConfigError):
    """Scalar argument outside its admissible range."""


class NotTracePreservingError(PetzlabError):
    """Kraus operators do not sum to the identity within tolerance."""


class BadParameterError(ConfigError):
    """Malformed channel parameter or specification."""


class SupportViolationError(PetzlabError):
    """First argument has support outside the support of the second."""


class RankDeficientRhoError(PetzlabError):
    """Code construction requires a full-rank input state."""


class BadProjectorError(PetzlabError):
    """Operator is not an orthogonal projector within tolerance."""


class EmptyCodeError(PetzlabError):
    """Code subspace has dimension zero."""


class NotUnitaryError(PetzlabError):
    """Matrix is not unitary within tolerance."""


class NotInvariantError(PetzlabError):
    """State is not invariant under the required group action."""


class EpsilonHalfError(ConfigError):
    """Dispersion is undefined at error parameter exactly one half."""


class ScaleLimitError(ConfigError):
    """Problem size exceeds the supported desk-scale limit."""


class BadParamsError(ConfigError):
    """One-shot parameter split violates its ordering constraints."""

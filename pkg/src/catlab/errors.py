"""Exception types shared across the package."""


class CatlabError(Exception):
    """Base class for all errors raised by catlab."""


class DimensionMismatchError(CatlabError):
    """Operands have incompatible dimensions."""


class DefectiveError(CatlabError):
    """Eigenvector matrix is (numerically) singular; no metric exists.

    Raised when the estimated condition number of the diagonalizing
    matrix exceeds the caller's limit, which is the signature of a
    Jordan block or a near-defective input.  The metric construction
    is numerically meaningless past that point, so we refuse.
    """


class AmplitudeOverflowError(CatlabError):
    """State amplitudes exceeded the configured magnitude cap."""


class OrthogonalBoundaryError(CatlabError):
    """Future and past states are (numerically) orthogonal at the
    evaluation time; the normalized matrix element has a pole."""


class NullStateError(CatlabError):
    """A state with zero norm reached an operation that needs a
    normalizable input (zero survivor overlap, vanishing metric
    denominator, ...)."""


class DegenerateRealPartsError(CatlabError):
    """Two surviving eigenvalues share a real part within tolerance,
    so a weight function of the real part is ill-defined."""


class InvariantViolationError(CatlabError):
    """A constructed object failed one of its own consistency checks."""


class ConfigError(CatlabError):
    """Experiment configuration is structurally or semantically invalid."""

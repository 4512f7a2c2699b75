"""Exception types shared across the package.

Everything raised on purpose derives from ManifoldUkfError so callers can
catch the whole family with one clause.  Numerical failures inside a filter
recursion are wrapped in FilterStepError, which records the 1-based step
index where the recursion died.
"""


class ManifoldUkfError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ManifoldUkfError):
    """Array shapes do not agree with the operation's contract."""


class NonSkewInput(ManifoldUkfError):
    """vee() received a matrix that is not skew-symmetric within tolerance."""


class NotARotation(ManifoldUkfError):
    """Matrix is not orthogonal with determinant +1 within tolerance."""


class NearPiRotation(ManifoldUkfError):
    """Rotation angle is too close to pi for the logarithm to be reliable."""


class MalformedEmbedding(ManifoldUkfError):
    """Bottom block rows of a group embedding are not exactly [0 I]."""


class NonPSDCovariance(ManifoldUkfError):
    """Covariance matrix is not symmetric positive semidefinite."""


class InvalidAlpha(ManifoldUkfError):
    """Sigma-point spread parameter is outside (0, 1]."""


class CholeskyFailure(ManifoldUkfError):
    """Covariance factorization failed even after the jitter retry."""


class SingularInnovationCovariance(ManifoldUkfError):
    """Innovation covariance could not be factorized during an update."""


class NonPSDState(ManifoldUkfError):
    """Belief covariance failed its symmetry / eigenvalue validation."""


class SingularCovariance(ManifoldUkfError):
    """State covariance is singular where an inverse is required."""


class UnknownLandmarkId(ManifoldUkfError):
    """Requested landmark index does not exist in the state."""


class FilterStepError(ManifoldUkfError):
    """A filter recursion failed; carries the failing step and the cause."""

    def __init__(self, step: int, cause: Exception):
        self.step = step
        self.cause = cause
        super().__init__(f"filter step {step} failed: {cause!r}")

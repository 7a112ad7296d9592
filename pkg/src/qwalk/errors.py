"""Exception hierarchy.

Validation problems (bad inputs, chains that fail their invariants) derive
from :class:`ValidationError`; numerical breakdowns (solver residuals,
degenerate denominators, failed bisections) derive from :class:`NumericError`.
The CLI maps the former to exit code 2 and the latter to exit code 3.
"""


class QwalkError(Exception):
    """Base class for everything raised by this package."""


class ValidationError(QwalkError, ValueError):
    """Invalid input or a chain violating its construction invariants."""


class NumericError(QwalkError, ArithmeticError):
    """A numerical procedure failed to meet its accuracy contract."""


# -- chain validation ---------------------------------------------------------

class RowSumViolation(ValidationError):
    """A row of the transition matrix does not sum to 1 within tolerance."""


class NotIrreducible(ValidationError):
    """The directed graph of nonzero transitions is not strongly connected."""


class NotAperiodic(ValidationError):
    """The gcd of directed cycle lengths exceeds 1."""


class NotReversible(ValidationError):
    """diag(pi) P is not symmetric within tolerance (detailed balance fails)."""


class MarkedOutOfRange(ValidationError):
    """A marked index is outside [0, n)."""


class EmptyMarkedSet(ValidationError):
    """Operation requires at least one marked node."""


class SOutOfRange(ValidationError):
    """Interpolation parameter s outside [0, 1)."""


# -- spectral / numeric -------------------------------------------------------

class ConvergenceFailure(NumericError):
    """Stationary-state solver residual above tolerance."""


class EigensolveFailure(NumericError):
    """Dense eigendecomposition failed or did not meet its residual check."""


class DegenerateDenominator(NumericError):
    """A 1 - lambda denominator in a hitting-time sum is below tolerance."""


class BisectionFailure(NumericError):
    """Root bracketing found no sign change."""


# -- edge-space operators -----------------------------------------------------

class TooLargeForDense(ValidationError):
    """n exceeds the guard for dense n^2 x n^2 construction."""


class CompletionFailure(NumericError):
    """Unitary completion of the edge isometry degenerated."""


class DegenerateTopEigenvalue(NumericError):
    """Some non-principal discriminant eigenvalue equals 1 within tolerance."""


class LocalityViolation(NumericError):
    """Edge-walk matrix has a nonzero entry outside the allowed pattern."""


# -- search algorithms --------------------------------------------------------

class UnsupportedMultiMarked(ValidationError):
    """The edge-walk search algorithm handles a single marked node only."""


class PMOutOfRange(ValidationError):
    """Marked stationary mass outside the domain of the interpolation point."""


class EpsilonOutOfRange(ValidationError):
    """Precision parameter outside (0, 1/4)."""


# -- generators / harness -----------------------------------------------------

class BadParams(ValidationError):
    """Invalid parameters for a graph family generator."""


class Disconnected(ValidationError):
    """Adjacency matrix is not connected."""


class NegativeWeight(ValidationError):
    """Adjacency matrix has a negative entry."""


class InsufficientData(ValidationError):
    """Scaling fit needs at least three rows."""


class NonPositiveValue(ValidationError):
    """Scaling fit requires strictly positive values."""


class ConditionWarning(UserWarning):
    """Spectral condition failed; the run proceeds and results are flagged."""

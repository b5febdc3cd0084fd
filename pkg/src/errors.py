"""Exception hierarchy.

Every error carries the process exit code the CLI reports for it. Families:

* ``InputError`` (3): unreadable or malformed input files.
* ``ConsistencyError`` (4): a computed object failed its own residual checks.
* ``NumericError`` (5): an algorithm could not produce a result (poles, brackets, integrators).
* ``DomainError`` (6): arguments outside the admissible range.
"""


class SBCError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(SBCError):
    exit_code = 3


class ConsistencyError(SBCError):
    exit_code = 4


class InconsistentCurveError(ConsistencyError):
    """Wronskian or anti-periodicity invariant violated."""


class ConstructionError(ConsistencyError):
    """A construction produced an object that fails its invariants."""


class ContinuationError(ConsistencyError):
    """A continuation branch jumped between consecutive grid points."""


class ValidationFailure(ConsistencyError):
    """An analytically located root failed the direct geometric test."""


class NumericError(SBCError):
    exit_code = 5


class PoleError(NumericError):
    """Evaluation within tolerance of a pole."""


class IntegrationError(NumericError):
    """ODE integrator failure or conserved-quantity drift."""


class SpectralError(NumericError):
    """Failure to bracket or certify a spectral quantity."""


class StepError(NumericError):
    """Blow-up detected in a PDE step."""


class BracketError(NumericError):
    """Root-finding endpoints do not bracket a sign change."""


class MonodromyError(NumericError):
    """Period or shift detection failed."""


class DomainError(SBCError):
    exit_code = 6


class ParameterError(DomainError):
    """Invalid discrete parameters, such as (k, n, m) for Lamé curves."""


class DegeneracyError(DomainError):
    """A determinant that must be nonzero vanishes."""


class UnsupportedError(DomainError):
    """Requested variant is not implemented."""


class AdmissibilityError(DomainError):
    """Even-gon input violating the alternating-sum condition."""


class ConstraintError(DomainError):
    """Vectors not tangent to the unit-determinant constraints."""

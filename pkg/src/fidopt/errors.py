"""Exception hierarchy.

Every error carries the name of the violated invariant in ``invariant`` so the
CLI can report it on stderr.
"""


class FidoptError(ValueError):
    invariant = "input"

    def __init__(self, message: str, invariant: str | None = None):
        super().__init__(message)
        if invariant is not None:
            self.invariant = invariant


class NonFiniteError(FidoptError):
    invariant = "finite-entries"


class DimensionError(FidoptError):
    invariant = "dimension-match"


class NotHermitianError(FidoptError):
    invariant = "hermitian"


class NotPSDError(FidoptError):
    invariant = "positive-semidefinite"


class InvalidStateError(FidoptError):
    invariant = "density-operator"


class InvalidPovmError(FidoptError):
    invariant = "povm"


class SingularSumError(FidoptError):
    invariant = "nonsingular-sum"


class IdenticalStatesError(FidoptError):
    invariant = "distinct-states"


class InfeasibleError(FidoptError):
    invariant = "feasibility"


class OptimalityDiagnosticWarning(UserWarning):
    """Structural verdict and numeric gap disagree beyond tolerance."""

"""Exception hierarchy for qplex."""


class QplexError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(QplexError, ValueError):
    pass


class NotHermitianError(QplexError, ValueError):
    pass


class NotPSDError(QplexError, ValueError):
    pass


class EigenSolverError(QplexError, ArithmeticError):
    pass


class PovmValidationError(QplexError, ValueError):
    """Raised when a list of effects is not a POVM.

    ``violations`` holds one ``(invariant, detail, magnitude)`` tuple per failed
    check so callers can report all problems at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"{name}: {detail} (magnitude {mag:.3e})" for name, detail, mag in self.violations]
        super().__init__("invalid POVM\n  " + "\n  ".join(lines))


class NotMorphophoricError(QplexError, ValueError):
    pass


class NotADesignError(QplexError, ValueError):
    pass


class NotInformationallyCompleteError(QplexError, ValueError):
    pass


class DecompositionError(QplexError, ValueError):
    """Boundary / dual-boundary decomposition is undefined for the input."""


class NotInAffineSpaceError(QplexError, ValueError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"vector is not in the primal affine space (residual {residual:.3e})")


class NotMubLikeError(QplexError, ValueError):
    def __init__(self, message, clusters=()):
        self.clusters = list(clusters)
        super().__init__(message)


class NotStronglyRegularError(QplexError, ValueError):
    pass


class NotDelsarteError(QplexError, ValueError):
    pass


class CliqueLimitError(QplexError, RuntimeError):
    pass


class FormatError(QplexError, ValueError):
    """Malformed interchange file; ``where`` names the offending field."""

    def __init__(self, message, where=""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)

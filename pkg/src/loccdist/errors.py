"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes or layouts."""


class UsageError(ValueError):
    """An argument violates an operation's precondition."""


class NormalizationError(ValueError):
    """A state or distribution is too far from normalized to be repaired."""


class InfeasibleTargetError(ValueError):
    """A requested diagonal value lies outside the reachable numerical range."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class ConvergenceError(RuntimeError):
    """An iterative construction failed to reach its tolerance.

    ``path`` is filled in by callers that run the construction inside a larger
    structure (e.g. the node history of an LOCC protocol tree).
    """

    def __init__(self, message, best_residual, path=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.path = path

    def __str__(self):
        base = super().__str__()
        if self.path is not None:
            return f"{base} (at node {self.path})"
        return base


class ParseError(ValueError):
    """Malformed input file. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)

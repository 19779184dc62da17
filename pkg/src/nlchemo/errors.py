"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Shapes or grids of the operands do not fit together."""


class PreconditionError(ValueError):
    """An input violates an operation's precondition (e.g. a negative density)."""


class SolverError(RuntimeError):
    """A linear solve failed to reach its tolerance within the iteration cap."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations

"""Exception types shared across the package."""


class StellarError(Exception):
    """Base class for every error raised by this package."""


class DomainError(StellarError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ResourceError(StellarError):
    """The request exceeds a hard size limit (dense matrices, permanents)."""


class NumericError(StellarError):
    """A numerical routine failed to meet its accuracy contract."""


class SymmetryViolationError(StellarError):
    """Input lies measurably outside the permutation-symmetric sector.

    ``deficit`` carries the measured violation (norm deficit or off-block
    norm, depending on the operation that raised).
    """

    def __init__(self, message: str, deficit: float):
        super().__init__(message)
        self.deficit = float(deficit)


class ConvergenceError(NumericError):
    """An optimizer hit its iteration cap.

    ``best`` carries the best result found so far; ``converged`` is False.
    """

    def __init__(self, message: str, best):
        super().__init__(message)
        self.best = best
        self.converged = False


class ExpressionError(StellarError):
    """A Hamiltonian expression was rejected."""

    def __init__(self, message: str, line: int = 1, column: int = 1, token: str = ""):
        self.line = int(line)
        self.column = int(column)
        self.token = token
        super().__init__(f"{message} (line {self.line}, column {self.column}, token {token!r})")


class ExpressionSyntaxError(ExpressionError):
    """Lexical or syntactic defect in a Hamiltonian expression."""


class ExpressionSemanticError(ExpressionError):
    """Structurally valid expression with inconsistent meaning (e.g. mixed arity)."""

"""Exception types shared across the solver modules."""

from __future__ import annotations


class RegretKitError(Exception):
    pass


class DimensionMismatch(RegretKitError, ValueError):
    pass


class InfeasibleProblem(RegretKitError):
    """The feasible set is empty (no path within the resource limit, an uncoverable row, ...)."""


class InfeasibleSolution(RegretKitError, ValueError):
    """A candidate solution vector lies outside the feasible set."""


class ClassicalSolveTimeout(RegretKitError, TimeoutError):
    pass


class CapExceeded(RegretKitError):
    """Enumeration would exceed the requested cap on feasible solutions."""


class ParseError(RegretKitError, ValueError):
    def __init__(self, message: str, line: int | None = None, token: str | None = None):
        where = f"line {line}: " if line is not None else ""
        tok = f" (token {token!r})" if token is not None else ""
        super().__init__(f"{where}{message}{tok}")
        self.line = line
        self.token = token


class BadShape(RegretKitError, ValueError):
    pass

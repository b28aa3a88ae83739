"""Exception hierarchy.

``GridError`` subclasses describe grids that are rejected before any numerics
run (the CLI maps them to exit code 2). ``SolverError`` subclasses come from
the numerical layer.
"""


class GridError(ValueError):
    """Invalid grid description."""


class ParseError(GridError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateNodeError(ParseError):
    pass


class SelfLoopError(ParseError):
    pass


class UndeclaredNodeError(ParseError):
    pass


class DisconnectedGraph(GridError):
    pass


class MissingPowerTerminal(GridError):
    pass


class MissingVoltageTerminal(GridError):
    pass


class NonPositiveResistance(GridError):
    pass


class SolverError(ArithmeticError):
    """Numerical failure."""


class SingularReduction(SolverError):
    pass


class ZeroVoltageEntry(SolverError):
    pass


class ZeroLoad(SolverError):
    pass


class NoDivergenceFound(SolverError):
    pass


class SingularJacobian(SolverError):
    pass


class MaxIterations(SolverError):
    pass

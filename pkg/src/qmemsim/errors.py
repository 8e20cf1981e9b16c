"""Exception types. Each carries a short category used by the CLI exit codes."""


class QmemsimError(Exception):
    category = "error"
    exit_code = 1


class ValidationError(QmemsimError, ValueError):
    """Input violates a documented precondition."""

    category = "invalid-input"
    exit_code = 2


class BoundaryError(ValidationError):
    """Parameters on the boundary of the unit square where a quantity is not unique."""

    category = "boundary"
    exit_code = 3


class ConvergenceError(QmemsimError, ArithmeticError):
    category = "numerical"
    exit_code = 4

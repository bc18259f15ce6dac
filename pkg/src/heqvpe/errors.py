"""Exception hierarchy shared by all modules.

Input-side errors map to CLI exit code 2, numeric failures to exit code 3.
"""


class HeqvpeError(Exception):
    exit_code = 2


class ParseError(HeqvpeError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ValidationError(HeqvpeError):
    pass


class BoundsError(HeqvpeError, IndexError):
    pass


class CapacityError(HeqvpeError):
    pass


class DomainError(HeqvpeError, ValueError):
    pass


class SpecError(HeqvpeError, ValueError):
    pass


class BindingError(HeqvpeError, ValueError):
    pass


class NumericError(HeqvpeError, ArithmeticError):
    exit_code = 3


class OptimizationError(NumericError):
    pass

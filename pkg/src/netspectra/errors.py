"""Exception hierarchy shared by all netspectra modules."""


class NetSpectraError(Exception):
    """Base class for every error raised by this package."""


class ParseError(NetSpectraError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormatError(ParseError):
    """Edge list mixes integer and string node tokens."""


class ParameterError(NetSpectraError, ValueError):
    pass


class SizeError(ParameterError):
    pass


class DataError(NetSpectraError, ValueError):
    pass


class ConvergenceError(NetSpectraError, RuntimeError):
    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual


class NumericalError(NetSpectraError, ArithmeticError):
    pass


class LexError(NetSpectraError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class EmptyGraphError(NetSpectraError):
    pass

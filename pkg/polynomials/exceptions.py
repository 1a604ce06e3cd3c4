"""Errors raised by the quantization workbench."""


class QuantizationError(Exception):
    """Base class for every error raised by the core apps."""


class DimensionMismatchError(QuantizationError):
    pass


class DegreeError(QuantizationError):
    pass


class ArityError(QuantizationError):
    pass


class OrderError(QuantizationError):
    pass


class IndexOutOfRangeError(QuantizationError):
    pass


class NotPoissonError(QuantizationError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(QuantizationError):
    """A precondition of an operation failed; `witness` names what failed."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ProblemFileError(QuantizationError):
    def __init__(self, message, field=None, line=None, column=None):
        location = []
        if field:
            location.append(field)
        if line is not None:
            location.append(f'line {line}, column {column}')
        if location:
            message = f"{': '.join(location)}: {message}"
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column


class InternalCheckError(QuantizationError):
    pass

"""Exception taxonomy shared by the library and the CLI exit codes."""


class EntcohError(Exception):
    exit_code = 4


class ParseError(EntcohError):
    exit_code = 1


class DimensionError(ParseError):
    """Tensor shapes that do not fit together."""


class ValidationError(EntcohError):
    exit_code = 2

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PreconditionError(ValidationError):
    """A structural hypothesis needed by a computation is not satisfied."""


class SizeLimitError(EntcohError):
    exit_code = 3

    def __init__(self, degree, size, cap):
        super().__init__(f"basis size {size} in degree {degree} exceeds cap {cap}")
        self.degree = degree
        self.size = size
        self.cap = cap


class InvariantError(EntcohError):
    """An identity that must hold by theory failed; a bug or a corrupt input."""

    exit_code = 4

"""Exception hierarchy shared by every module."""


class LojaError(Exception):
    """Base class for all errors raised by the package."""


class ParseError(LojaError):
    """Syntax error in a function source, with 1-based line/column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ArityError(LojaError):
    """A variable index falls outside the declared arity."""


class DomainError(LojaError):
    """No branch guard holds at an evaluation point."""


class EvaluationError(LojaError):
    """Arithmetic failure inside a branch (sqrt of negative, division by zero)."""


class EmptySetError(LojaError):
    """An operation that needs a nonempty point set received an empty one."""


class DimensionError(LojaError):
    """Point dimensions do not match."""


class PoleError(LojaError):
    """Stereographic projection requested at (or too near) the north pole."""


class IsolatedPointError(LojaError):
    """Kuratowski limits requested at a point with no nearby domain samples."""


class NotInDomainError(LojaError):
    """The base point of a preimage or N-region is outside the domain."""

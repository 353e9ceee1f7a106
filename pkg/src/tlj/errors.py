"""Exception hierarchy shared by every tlj module."""

from __future__ import annotations


class TLJError(Exception):
    """Base class for all errors raised by tlj."""


class DomainError(TLJError, ValueError):
    """An argument lies outside the domain of an operation."""


class SizeMismatchError(DomainError):
    """Two diagrams or elements with different strand counts were combined."""


class EvaluationError(TLJError, ArithmeticError):
    """Numeric specialization hit a pole."""


class ResourceCapError(TLJError):
    """A requested size exceeds the configured strand cap."""


class TruncationOverflow(TLJError):
    """A module action produced weights above the truncation bound."""

    def __init__(self, message: str, overflow):
        super().__init__(message)
        self.overflow = overflow


class ExprError(TLJError):
    """Base class for expression language errors; carries a source span."""

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        if span is not None:
            message = f"{message} at {span[0]}:{span[1]}"
        super().__init__(message)
        self.span = span


class ParseError(ExprError):
    pass


class ExprTypeError(ExprError):
    pass


class ExprEvalError(ExprError):
    """Evaluation failed on a well-typed expression (division by zero, bad exponent)."""

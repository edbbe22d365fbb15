"""Exception hierarchy shared by every module."""


class SeqComplexError(Exception):
    """Base class for all package errors."""


class CapacityError(SeqComplexError):
    """An exact enumeration or search would exceed its configured budget."""


class DomainError(SeqComplexError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class KindError(SeqComplexError, TypeError):
    """A function class has the wrong kind for the requested operation."""


class StructureError(SeqComplexError, ValueError):
    """Malformed or mismatched tree structure."""


class ProtocolError(SeqComplexError, RuntimeError):
    """An online protocol was violated (e.g. realizability assumption broken)."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ContractError(SeqComplexError, ValueError):
    """A precondition on user-supplied objects (e.g. Lipschitz maps) failed."""

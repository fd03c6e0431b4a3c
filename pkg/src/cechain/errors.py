"""Exception hierarchy shared by every module of the package."""


class CEChainError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(CEChainError, ValueError):
    """Operands live in different ambient spaces or have incompatible shapes."""


class SingularMatrix(CEChainError, ValueError):
    pass


class NonExactDivision(CEChainError, ArithmeticError):
    """Polynomial division left a nonzero remainder."""


class NotBalanced(CEChainError, ValueError):
    pass


class ComponentNotBalanced(NotBalanced):
    pass


class FlagDoesNotContainDirectrix(CEChainError, ValueError):
    pass


class NotTransverse(CEChainError, ValueError):
    pass


class SubspacesMeetProperly(CEChainError, ValueError):
    pass


class DegeneratePosition(CEChainError):
    """Random or supplied data hit a special (measure-zero) configuration."""


class QuadricContainsLink(CEChainError):
    pass


class OutOfRange(CEChainError, ValueError):
    pass


class PreconditionFailed(CEChainError):
    """A genericity predicate required by the computation does not hold.

    ``predicate`` names the failing check so callers can report it.
    """

    def __init__(self, predicate, message=None):
        self.predicate = predicate
        super().__init__(message or f"precondition failed: {predicate}")


class RecordError(CEChainError, ValueError):
    """A serialized record could not be parsed or validated."""

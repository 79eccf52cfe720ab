"""Exception types shared across the package.

Every exception carries a ``details`` dict so the CLI can serialize a
machine-readable diagnostic without knowing the concrete class.
"""


class CubetopError(Exception):
    """Base class; ``details`` is copied into CLI diagnostics."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self), **self.details}


class MalformedInput(CubetopError):
    pass


class InconsistentAttachment(CubetopError):
    pass


class UnknownCell(CubetopError):
    pass


class UnsupportedDimension(CubetopError):
    pass


class NotNpc(CubetopError):
    pass


class BudgetExceeded(CubetopError):
    pass


class NotCombinatorial(CubetopError):
    pass


class NotLocalIsometry(CubetopError):
    pass


class NotLocallyConvex(CubetopError):
    pass


class SquareInconsistency(CubetopError):
    pass


class BoundedModeInconclusive(CubetopError):
    pass


class HypothesisFailure(CubetopError):
    pass


class AttachmentNotLocalIsometry(CubetopError):
    pass


class ClassBudgetExceeded(CubetopError):
    pass


class UnknownFixture(CubetopError):
    pass

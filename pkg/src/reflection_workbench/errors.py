"""Exception hierarchy shared by all workbench modules."""


class WorkbenchError(Exception):
    pass


class FieldMismatch(WorkbenchError):
    pass


class ArityMismatch(WorkbenchError):
    pass


class NotDivisible(WorkbenchError):
    """Raised by exact division; ``remainder`` holds the nonzero remainder."""

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class UnsupportedRank(WorkbenchError):
    pass


class UnsupportedFamily(WorkbenchError):
    pass


class UnsupportedFieldExact(WorkbenchError):
    pass


class GroupTooLarge(WorkbenchError):
    pass


class NotFiniteType(WorkbenchError):
    pass


class FactorizationFailure(WorkbenchError):
    pass


class NotInvariant(WorkbenchError):
    pass


class RewriteInconsistent(WorkbenchError):
    pass


class DivisibilityFailure(WorkbenchError):
    pass


class LatticeTooLarge(WorkbenchError):
    pass


class ClassificationFailure(WorkbenchError):
    pass


class FlatnessViolation(WorkbenchError):
    pass


class PointNotInField(WorkbenchError):
    pass


class EmptyCompact(WorkbenchError):
    pass


class DegenerateFit(WorkbenchError):
    pass


class NonpositiveBase(WorkbenchError):
    pass


class UnsupportedGroupForProbe(WorkbenchError):
    pass


class RayOnMirror(WorkbenchError):
    pass


class InsufficientFlatness(WorkbenchError):
    pass

"""Exception types shared across modules.

Every error carries a short machine-readable ``code`` that the CLI prints
as the diagnostic name.
"""


class FlatSurfaceError(Exception):
    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class InputError(FlatSurfaceError, ValueError):
    code = "InputError"


class MismatchedEdge(InputError):
    code = "MismatchedEdge"


class NonConvexPolygon(InputError):
    code = "NonConvexPolygon"


class BadConeAngle(InputError):
    code = "BadConeAngle"


class WrongGenus(InputError):
    code = "WrongGenus"


class NotConnected(InputError):
    code = "NotConnected"


class InvalidPrototype(InputError):
    code = "InvalidPrototype"


class DegenerateLattice(InputError):
    code = "DegenerateLattice"


class SlitThroughLatticePoint(InputError):
    code = "SlitThroughLatticePoint"


class BadDiscriminant(InputError):
    code = "BadDiscriminant"


class DifferentSurfaces(InputError):
    code = "DifferentSurfaces"


class PreconditionFailed(FlatSurfaceError, ValueError):
    code = "PreconditionFailed"


class NotFound(FlatSurfaceError):
    code = "NotFound"


class NoRoom(FlatSurfaceError):
    code = "NoRoom"


class TooLargeT(FlatSurfaceError):
    code = "TooLargeT"


class NotPeriodic(FlatSurfaceError):
    code = "NotPeriodic"


class NormalizationFailed(FlatSurfaceError):
    code = "NormalizationFailed"


class BudgetExceeded(FlatSurfaceError):
    code = "BudgetExceeded"


class SearchBudgetTooSmall(FlatSurfaceError):
    code = "SearchBudgetTooSmall"


class DisconnectedBall(FlatSurfaceError):
    code = "DisconnectedBall"

"""Exception hierarchy shared by the geometry kernel, solvers and CLI."""


class SubgradNewtonError(Exception):
    """Base class for all package errors."""


class PointNotInSet(SubgradNewtonError, ValueError):
    """Query point lies on no piece of the set within tolerance."""


class PointNotOnGraph(PointNotInSet):
    """Query pair (x, v) is not on the graph of the mapping."""


class Infeasible(SubgradNewtonError):
    """The direction set is empty."""


class ScriptViolation(SubgradNewtonError):
    """A scripted direction failed the membership recheck."""


class Unsupported(SubgradNewtonError):
    """The problem lacks the data an operation needs."""


class NonFiniteIterate(SubgradNewtonError, FloatingPointError):
    """An iterate overflowed or became NaN."""


class NotDescentDirection(SubgradNewtonError, ValueError):
    pass


class LineSearchStalled(SubgradNewtonError):
    pass


class OutsideStartRegion(SubgradNewtonError, ValueError):
    """Starting point is outside rge(I + lam * subdifferential)."""


class DimensionMismatch(SubgradNewtonError, ValueError):
    pass


class NotDiagonal(SubgradNewtonError, ValueError):
    pass


class NotDiagonalizable(SubgradNewtonError, ValueError):
    pass


class EnumerationCapExceeded(SubgradNewtonError):
    pass

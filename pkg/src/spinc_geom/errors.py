"""Exception hierarchy shared by all verification modules."""


class SpincGeomError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(SpincGeomError, ValueError):
    pass


class ValidationError(SpincGeomError, ValueError):
    pass


class ChartError(SpincGeomError, ValueError):
    """A point lies outside the coordinate chart of the ambient model."""


class DegenerateChartError(SpincGeomError, ValueError):
    pass


class StencilError(SpincGeomError, ValueError):
    pass


class FrameError(SpincGeomError, ValueError):
    pass


class PreconditionError(SpincGeomError, ValueError):
    """A hypothesis of a theorem being verified does not hold."""


class InfeasibleSisterError(PreconditionError):
    pass


class ZeroSpinorError(SpincGeomError, ValueError):
    pass

"""Exception types raised by the geometry kernels."""


class SphereoidError(Exception):
    """Base class for every numerical-geometry failure in this package."""


class HemisphereViolation(SphereoidError, ValueError):
    """A point lies on or beyond the equator of the chart center."""


class DegenerateHull(SphereoidError, ValueError):
    """Point set does not span the ambient space; the hull has no interior."""


class OriginNotInterior(SphereoidError, ValueError):
    pass


class CentroidUndefined(SphereoidError, ArithmeticError):
    """The (weighted) vector sum vanishes, so no centroid direction exists."""


class MeasureTooSmall(SphereoidError, ArithmeticError):
    pass


class ProductTooLarge(SphereoidError, ValueError):
    pass


class TargetOutOfRange(SphereoidError, ValueError):
    """A matched cap or ball cannot reach the requested measure."""


class RejectionStall(SphereoidError, RuntimeError):
    pass


class InfeasibleSupports(SphereoidError, ValueError):
    """Support values do not describe a body with nonempty interior."""


class UnsupportedPower(SphereoidError, ValueError):
    pass

"""Exception types raised by the geometry routines."""


class GeometryError(ValueError):
    """Base class; every failure names the check that tripped."""


class NonNegativeTau(GeometryError):
    """The 3-form is not in the orbit with negative tau."""


class NotAlternating(GeometryError):
    """A candidate 3-form failed antisymmetry."""


class NotSkew(GeometryError):
    pass


class NotComplexStructure(GeometryError):
    pass


class WrongOrientation(GeometryError):
    pass


class SamplingExhausted(GeometryError):
    pass


class NotInAOMinus(GeometryError):
    """Raised when a1^2 + a2^2 + a3^2 >= 3/4, i.e. tau(d omega_I) >= 0."""


class SingularSkewPart(GeometryError):
    pass


class PoleAtHalf(GeometryError):
    """The Ricci closed forms have a pole at t = 1/2."""

"""Exception types shared across the package."""


class WcboundError(Exception):
    """Base class for all wcbound-specific errors."""


class InputFormatError(WcboundError):
    """A system or parameter file is malformed or dimensionally inconsistent."""


class UnstableSystemError(WcboundError):
    """The closed-loop matrix is not Hurwitz; bounds do not exist."""


class UnsupportedMultiplicityError(WcboundError):
    """An eigenvalue has algebraic multiplicity above 2 (or a repeated
    complex pair), which the closed forms do not cover."""


class QuadratureError(WcboundError):
    """Adaptive quadrature failed to reach the requested tolerance."""

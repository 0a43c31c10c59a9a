"""Exception hierarchy shared by all modules."""


class SuperhedgeError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(SuperhedgeError, ValueError):
    pass


# cone construction -------------------------------------------------------

class ConeError(SuperhedgeError, ValueError):
    pass


class NonPositiveMid(ConeError):
    pass


class NumeraireNotOne(ConeError):
    pass


class SpreadNotGreaterThanOne(ConeError):
    pass


class IntervalViolatesAssumption2(ConeError):
    """Bid-ask box is inconsistent with the declared spread bound or has no interior."""


class SliceCoordinateNotOne(ConeError):
    pass


# tree / enlarged market --------------------------------------------------

class TreeError(SuperhedgeError, ValueError):
    pass


class EmptyInteriorGrid(SuperhedgeError):
    pass


class GridMissingVertices(SuperhedgeError):
    pass


# pricing -----------------------------------------------------------------

class PricingError(SuperhedgeError):
    pass


class Unbounded(PricingError):
    """The super-hedging program is unbounded below: the market admits arbitrage.

    ``ray`` holds an improving direction certified by the LP kernel.
    """

    def __init__(self, message, ray=None):
        super().__init__(message)
        self.ray = ray


class Infeasible(PricingError):
    def __init__(self, message, farkas=None):
        super().__init__(message)
        self.farkas = farkas


class NAViolated(PricingError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class UnsupportedShape(SuperhedgeError):
    pass


class UnsupportedClaim(PricingError):
    pass


# files -------------------------------------------------------------------

class SpecParseError(SuperhedgeError, ValueError):
    """Market-spec file could not be parsed; ``where`` names the line or field."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)

"""Exception hierarchy.

Every precondition failure raised by the library derives from
:class:`GeohydroError`, itself a :class:`ValueError`, so callers that only
care about "bad input" can catch one type.
"""


class GeohydroError(ValueError):
    """Base class for all library errors."""


class NonZeroMean(GeohydroError):
    pass


class NonPositiveDensity(GeohydroError):
    pass


class NonPositiveField(GeohydroError):
    pass


class ParseError(GeohydroError):
    """Malformed expression source. ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class EvalError(GeohydroError):
    pass


class AntipodalEndpoints(GeohydroError):
    pass


class VanishingModulus(GeohydroError):
    pass


class NonzeroWinding(GeohydroError):
    def __init__(self, winding):
        super().__init__(f"phase winds {winding} times around the circle")
        self.winding = winding


class NonHorizontal(GeohydroError):
    pass


class ZeroVelocity(GeohydroError):
    pass


class VacuumFormation(GeohydroError):
    pass


class ArclengthDrift(GeohydroError):
    pass


class VanishingCurvature(GeohydroError):
    pass


class NonzeroTotalTorsion(GeohydroError):
    pass


class MissingSnapshots(GeohydroError):
    pass


class ConfigError(GeohydroError):
    pass

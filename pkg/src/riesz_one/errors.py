"""Exception and warning types shared across the package."""


class RieszError(Exception):
    """Base class for all computation errors raised by this package."""


class EmptyConstruction(RieszError):
    pass


class CutTooSmall(RieszError):
    pass


class NegativeSpacer(RieszError):
    pass


class SpacerShapeError(RieszError):
    pass


class StageOutOfRange(RieszError):
    pass


class OverflowLimit(RieszError):
    """Integer arithmetic exceeded the 128-bit checked range."""


class CombinatorialCap(RieszError):
    """Requested sumset / occurrence set exceeds the configured cap."""


class UnknownPreset(RieszError):
    pass


class BadParams(RieszError):
    pass


class DegreeTooLarge(RieszError):
    pass


class RootFindingDiverged(RieszError):
    pass


class LagOutOfRange(RieszError):
    pass


class GridMismatch(RieszError):
    pass


class TooFewTerms(RieszError):
    pass


class WitnessUndefined(RieszError):
    pass


class LogDiverged(RieszError):
    pass


class ToeplitzSingular(RieszError):
    pass


class GridTooCoarseWarning(UserWarning):
    """Grid does not resolve the polynomial product exactly; results are estimates."""


class NotConvergedWarning(UserWarning):
    """Truncated expansion has not decayed to tolerance."""

class BrouwerEntropyError(Exception):
    pass


class InvalidParameterError(BrouwerEntropyError, ValueError):
    """Bad construction parameters, e.g. alpha outside (L-1, L]."""


class LayoutBoundError(BrouwerEntropyError):
    """A query needs staircase structures beyond the materialized k_max."""

    def __init__(self, message: str, needed: int | None = None, k_max: int | None = None):
        super().__init__(message)
        self.needed = needed
        self.k_max = k_max


class ChartError(BrouwerEntropyError, ValueError):
    """Point does not exist in the requested chart (y <= 0 away from its own chart)."""


class NonWanderingRegionError(BrouwerEntropyError, ValueError):
    """Region meets the non-wandering locus, so hit counts are unbounded."""


class FamilyError(BrouwerEntropyError, ValueError):
    pass


class FitError(BrouwerEntropyError, ValueError):
    pass

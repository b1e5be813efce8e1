"""Exception hierarchy."""


class AlphaRepError(Exception):
    """Base class for every error raised by alpharep."""


class InvalidDimensionError(AlphaRepError, ValueError):
    pass


class InvalidLevelError(AlphaRepError, ValueError):
    pass


class InvalidSplitterError(AlphaRepError, ValueError):
    pass


class InvalidSqueezingError(AlphaRepError, ValueError):
    pass


class InvalidConfigError(AlphaRepError, ValueError):
    pass


class TruncationRiskError(AlphaRepError):
    """A Fock cutoff is too small for the requested amplitude or squeezing.

    Raised instead of returning a silently degraded result.
    """


class ZeroProbabilityBranch(AlphaRepError):
    """A heralding outcome has (numerically) zero probability."""

    def __init__(self, probability, message=None):
        self.probability = probability
        super().__init__(message or f"outcome probability {probability:.3e} is below 1e-15")

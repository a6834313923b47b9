"""Exception hierarchy for greedcert."""

from typing import Optional


class GreedCertError(Exception):
    """Root of every error raised on purpose by this package."""


class ZeroColumn(GreedCertError, ValueError):
    def __init__(self, index: int, norm: float):
        super().__init__(f"column {index} has norm {norm:.3e}, cannot normalize")
        self.index = index
        self.norm = norm


class RankDeficientActiveSet(GreedCertError, ValueError):
    def __init__(self, index: int, residual_norm: float):
        super().__init__(
            f"atom {index} lies in the span of the active set "
            f"(projected norm {residual_norm:.3e})"
        )
        self.index = index
        self.residual_norm = residual_norm


class InvalidDimensions(GreedCertError, ValueError):
    pass


class DimensionMismatch(GreedCertError, ValueError):
    pass


class AllAtomsDegenerate(GreedCertError):
    """Every atom outside the active set projects to zero."""


class CoherenceTooLarge(GreedCertError, ValueError):
    def __init__(self, mu: float, limit: float, what: str = ""):
        label = f" for {what}" if what else ""
        super().__init__(f"coherence {mu!r} must be below {limit!r}{label}")
        self.mu = mu
        self.limit = limit


class InvalidIndex(GreedCertError, ValueError):
    pass


class NotApplicable(GreedCertError):
    """The requested theorem does not cover this signal profile."""


class InvalidParameters(GreedCertError, ValueError):
    pass


class InvalidCoherence(GreedCertError, ValueError):
    pass


class ConstructionFailed(GreedCertError):
    def __init__(self, message: str, report: Optional[dict] = None):
        super().__init__(message)
        self.report = report


class InfeasibleGeneration(GreedCertError):
    pass


class ResultIOError(GreedCertError, OSError):
    pass

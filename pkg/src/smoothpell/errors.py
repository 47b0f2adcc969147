"""Exception hierarchy.

Two families matter to callers: :class:`ConsistencyError` subclasses mean a
mathematical invariant failed and the whole run must abort (CLI exit 1);
everything else is a usage or capacity problem.
"""


class SmoothPellError(Exception):
    pass


class InvalidRadicand(SmoothPellError, ValueError):
    pass


class PeriodCapExceeded(SmoothPellError):
    """Continued fraction period longer than the configured step cap."""

    def __init__(self, d, step_cap, partial=None):
        super().__init__(f"period of sqrt({d}) exceeds step cap {step_cap}")
        self.d = d
        self.step_cap = step_cap
        self.partial = partial


class RegulatorMethodExhausted(SmoothPellError):
    def __init__(self, d, ceiling):
        super().__init__(f"d={d} exceeds the regulator ceiling {ceiling}")
        self.d = d
        self.ceiling = ceiling


class DigitCapExceeded(SmoothPellError):
    pass


class PrecisionError(SmoothPellError):
    pass


class ValuationOverflow(SmoothPellError):
    def __init__(self, prime, cap):
        super().__init__(f"valuation of {prime} exceeded cap {cap}")
        self.prime = prime
        self.cap = cap


class CheckpointError(SmoothPellError):
    pass


class ConsistencyError(SmoothPellError):
    """An internal mathematical invariant failed; results cannot be trusted."""


class CorruptRegulator(ConsistencyError):
    pass


class ClassificationError(ConsistencyError):
    pass


class PerronViolation(ConsistencyError):
    pass


class SmoothConfirmationError(ConsistencyError):
    pass


class ReconstructionError(ConsistencyError):
    pass


class GRHCheckFailed(ConsistencyError):
    pass

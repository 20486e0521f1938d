"""Exception types shared across the package."""


class SlevirError(Exception):
    """Base class; ``code`` identifies the violated invariant in machine-readable reports."""

    code = "error"


class SpecializationError(SlevirError, ArithmeticError):
    code = "specialization-pole"


class WindowError(SlevirError, IndexError):
    """A coefficient was requested outside the range a truncated series can guarantee."""

    code = "window"


class DepthError(SlevirError, ValueError):
    """An operation needs Loewner coefficients beyond the configured depth."""

    code = "depth-overflow"


class ChamberError(SlevirError, ValueError):
    code = "chamber-violation"


class NullFieldError(SlevirError, ValueError):
    code = "null-field-failure"


class LevelOverflowError(SlevirError, ValueError):
    code = "level-overflow"


class RecursionInconsistency(SlevirError, RuntimeError):
    code = "recursion-inconsistent"


class QuadratureError(SlevirError, ValueError):
    code = "quadrature"

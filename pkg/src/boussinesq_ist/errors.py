"""Exception hierarchy.

Each family maps onto a CLI exit code: validation problems exit with 2,
numerical-stability problems with 3 and violated spectral assumptions with 4.
"""

from __future__ import annotations


class BoussinesqError(Exception):
    exit_code = 1


class ValidationError(BoussinesqError, ValueError):
    """Bad input: unknown family, out-of-domain argument, malformed config."""

    exit_code = 2

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class ZeroMeanViolation(ValidationError):
    def __init__(self, integral: float):
        super().__init__(f"u1 must have zero mean, got integral {integral:.3e}", field="from_u1")
        self.integral = integral


class SectorError(ValidationError):
    """Ray outside the validity sector zeta > zeta0 (or |r1| >= 1 on the ray)."""


class CoverageError(ValidationError):
    """Requested point not covered by the sampled spectral line."""


class NumericalError(BoussinesqError):
    exit_code = 3


class InstabilityError(NumericalError):
    def __init__(self, message: str, exponent: complex | None = None):
        super().__init__(message)
        self.exponent = exponent


class StiffnessError(NumericalError):
    pass


class BudgetExceeded(NumericalError):
    def __init__(self, message: str, best_estimate=None, error_estimate: float = float("inf")):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class GammaOverflow(NumericalError, OverflowError):
    def __init__(self, nu: float, threshold: float):
        super().__init__(f"e^(pi*nu) overflows for nu={nu:g} (threshold {threshold:.4f})")
        self.threshold = threshold


class PDEStabilityError(NumericalError):
    def __init__(self, message: str, step: int):
        super().__init__(f"{message} at step {step}")
        self.step = step


class DomainTooSmallError(NumericalError):
    """Periodic box too small: dispersed waves may wrap around before t_end."""


class AssumptionError(BoussinesqError):
    exit_code = 4


class SolitonSuspected(AssumptionError):
    def __init__(self, k: complex, value: complex):
        super().__init__(f"|s11| = {abs(value):.3e} at k = {k:.6g}: possible soliton")
        self.k = k
        self.value = value

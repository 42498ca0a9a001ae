"""Exception types shared across the package."""

import os

DEFAULT_BUDGET = 10**9


class JetCircleError(Exception):
    """Base class for all library errors."""


class FieldMismatch(JetCircleError, ValueError):
    """Operands live over different fields or jet orders."""


class BudgetExceeded(JetCircleError):
    """An enumeration would exceed the configured point budget."""

    def __init__(self, needed, budget, what="enumeration"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what} needs {needed} points, budget is {budget}")


class InsufficientPrecision(JetCircleError):
    """A result would depend on Laurent digits below the stored floor."""


class CoverageViolation(JetCircleError):
    """An alpha class was found outside every major arc up to M."""


class NonIntegralResult(JetCircleError, ArithmeticError):
    """An exact division that must be integral was not."""


class DeskScaleOverflow(JetCircleError, OverflowError):
    """Counts would overflow the fixed-width accumulators."""


def default_budget():
    """Budget from ``JETCIRCLE_BUDGET`` or 10**9."""
    raw = os.environ.get("JETCIRCLE_BUDGET")
    if raw:
        return int(float(raw))
    return DEFAULT_BUDGET


def check_budget(needed, budget=None, what="enumeration"):
    if budget is None:
        budget = default_budget()
    if needed > budget:
        raise BudgetExceeded(needed, budget, what)

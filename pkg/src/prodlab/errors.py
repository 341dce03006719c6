"""Shared exception types and default resource budgets."""

from __future__ import annotations

# Desk-scale caps: enumeration kernels refuse rather than grind.
DEFAULT_TUPLE_BUDGET = 10**7
DEFAULT_SAMPLE_BUDGET = 10**6


class ProdlabError(Exception):
    """Base class for package-specific errors."""


class ZeroValueError(ProdlabError):
    """An operation would produce or consume zero, which has no factored form."""


class BudgetError(ProdlabError):
    """An enumeration or quadrature would exceed its configured budget."""


class RegimeError(ProdlabError):
    """A bound's regime preconditions do not hold for the given input."""

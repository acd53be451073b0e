"""Shared exception types.

The CLI maps these onto its exit-code contract: configuration problems exit
with 2, tolerance breaches with 1, and exhausted numerical budgets with 3.
"""


class StokesbcError(Exception):
    """Base class for all library errors."""


class InvalidModeError(StokesbcError):
    """Mode parameters outside the admissible set (Re lambda < 0, nonpositive
    constants, non-finite entries, ...)."""


class ZeroModeError(StokesbcError):
    """An operation that requires a nonzero tangential frequency received
    xi = 0 (the mean mode needs its own 1-d treatment)."""


class SingularModeError(StokesbcError):
    """A closed-form inverse or solve was requested at a parameter point where
    the displayed formula is singular (e.g. xi = 0 for the no-slip symbol)."""


class UnsupportedCaseError(StokesbcError):
    """The requested (alpha, beta) case is outside the operator's domain
    (e.g. a boundary symbol for beta = -1, which needs no symbol solve)."""


class ProfileError(StokesbcError):
    """Invalid exponential-sum profile (non-decaying rate for xi != 0,
    mismatched mode data, ...)."""


class QuadratureBudgetError(StokesbcError):
    """Adaptive quadrature exceeded its subdivision budget before reaching
    the requested tolerance."""


class ConfigError(StokesbcError):
    """Malformed run configuration (unknown keys, wrong types, nonpositive
    tolerances)."""


class AuditError(StokesbcError):
    """An audit refused to run because its preconditions failed (e.g. the
    field does not decay at the truncation boundary)."""

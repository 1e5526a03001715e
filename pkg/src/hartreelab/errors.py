"""Exception taxonomy shared by all hartreelab modules."""

from __future__ import annotations


class HartreeLabError(Exception):
    """Base class for all package errors."""


class DomainError(HartreeLabError):
    """An input violates a documented precondition (names the violated bound)."""


class InfeasibleError(HartreeLabError):
    """A derived exponent falls outside its admissible window."""


class InfeasibleParams(HartreeLabError):
    """Model parameters outside the regime a solver supports."""


class PreconditionError(HartreeLabError):
    """A caller-side precondition of an operation does not hold."""


class HardyViolation(HartreeLabError):
    """The discrete quadratic form came out negative beyond tolerance.

    Signals a discretization failure, not a property of the continuum form.
    """


class NonFinite(HartreeLabError):
    """A field amplitude overflowed (typically blow-up in progress)."""


class NoConvergence(HartreeLabError):
    """An iterative solver hit its iteration cap before meeting tolerances."""


class EigFailure(HartreeLabError):
    """Eigendecomposition of the discrete operator failed (grid pathology)."""


class CadenceError(HartreeLabError):
    """A stored trajectory is too short or unevenly sampled for the request."""


class ParseError(HartreeLabError):
    """Config file is syntactically malformed; message carries line numbers."""


class ValidationError(HartreeLabError):
    """Config is well-formed but semantically invalid; aggregates all issues."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(self.issues))

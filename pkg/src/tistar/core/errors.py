"""
Exception hierarchy for tistar.

Every domain failure derives from :class:`TistarError` and carries the
process exit code the CLI reports for it.
"""

from typing import Any


class TistarError(Exception):
    """Base class for all tistar failures."""

    exit_code = 1

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} ({details})"


class SpecParseError(TistarError, ValueError):
    """A generator spec, graph spec, field file or option could not be parsed."""

    exit_code = 2


class BudgetError(TistarError):
    """A computation would exceed the lattice it runs on."""

    exit_code = 3


class SupportOverflowError(BudgetError):
    """A product of fields would alias outside the momentum lattice."""


class LoopBudgetError(BudgetError):
    """A loop-momentum sum exceeds the configured number of terms."""


class NumericalError(TistarError):
    """A numerical quantity left the representable range."""

    exit_code = 4


class NumericalOverflowError(NumericalError):
    """The real part of an exponent exceeded the overflow guard."""


class NonFiniteError(NumericalError):
    """A derivative or sum produced NaN or infinity."""


class PoleError(NumericalError):
    """A kinetic symbol vanishes on a lattice momentum."""


class CohomologyError(TistarError):
    """A cohomological precondition does not hold."""


class NotACocycleError(CohomologyError):
    """The generator fails the cyclic (cocycle) condition."""


class NotACoboundaryError(CohomologyError):
    """The generator has a nonzero harmonic part."""


class InconsistentCoboundaryError(CohomologyError):
    """A recovered witness does not reproduce the generator on the lattice."""


class ValidationFailure(TistarError, ValueError):
    """Inputs are well-formed but violate a structural requirement."""


class GridMismatchError(ValidationFailure):
    """Two fields live on different lattices."""


class EmptySampleError(ValidationFailure):
    """A predicate was asked to evaluate on no points."""


class OffLatticeError(ValidationFailure):
    """A momentum does not lie on the lattice it is used with."""


class DimensionMismatchError(ValidationFailure):
    """Momentum dimensions of two objects disagree."""


class UnitalityError(ValidationFailure):
    """A cochain violates f(0)=0 or f(p,0)=f(p,p)=0."""


class UnsupportedLevelError(ValidationFailure):
    """A cochain level outside the supported range was requested."""

"""Exception hierarchy for the symmetry library.

Input errors (bad dimensions, zero vectors) derive from ``ValueError`` as well, so callers that only
know the standard library still catch them. Mathematical failures say that an instance does not satisfy
a hypothesis (it is not a symmetry, it leaves the dense set, a witness does not verify); the CLI maps
them to exit code 1 and everything else to exit code 2.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, ClassVar

if TYPE_CHECKING:
    from symmetry.reconstruct import ReconstructionReport


class WignerError(Exception):
    """Base class for all errors raised by the library."""

    reason: ClassVar[str] = "error"


class DimensionError(WignerError, ValueError):
    """Dimensions of vectors, projections, witnesses or generator parameters do not fit together."""

    reason = "dimension"


class ZeroVectorError(WignerError, ValueError):
    """A vector too close to zero was used to define a projection."""

    reason = "zero_vector"


class NonFiniteError(WignerError, ValueError):
    """A coordinate is NaN or infinite."""

    reason = "non_finite"


class InternalError(WignerError, RuntimeError):
    """An invariant that upstream code should have guaranteed is broken."""

    reason = "internal"


class MathematicalFailure(WignerError):
    """An instance violates a mathematical hypothesis of the reconstruction."""


class ZeroPivotError(MathematicalFailure):
    reason = "zero_pivot"


class InconsistentProfileError(MathematicalFailure):
    reason = "inconsistent_profile"


class NotInDomainError(MathematicalFailure):
    """The projection has a vanishing coordinate, so it lies outside the resolved dense set."""

    reason = "not_in_domain"


class NotASymmetryError(MathematicalFailure):
    reason = "not_a_symmetry"


class ParsevalError(MathematicalFailure):
    """An image left the span of the extracted frame."""

    reason = "parseval"


class PhaseRelationError(MathematicalFailure):
    reason = "phase_relation"


class VerificationError(MathematicalFailure):
    """The reconstructed witness does not reproduce the black box on the sampled vectors."""

    reason = "verification"

    def __init__(self, message: str, report: ReconstructionReport | None = None, **details: Any) -> None:
        super().__init__(message)
        self.report = report
        self.details = details

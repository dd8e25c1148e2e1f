from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Tolerances(BaseModel):
    """
    Numerical thresholds shared by every module.

    Attributes
    ----------
    ZERO : float
        Modulus below which a coordinate counts as zero.
    NORM : float
        Allowed deviation of a representative's norm from one.
    EQ : float
        Gap distance up to which two projections are considered equal. Also the
        slack for orthonormality, phase-relation and Parseval checks.
    VERIFY : float
        Maximum gap residual accepted when certifying a reconstructed witness.
    """

    model_config = ConfigDict(frozen=True)

    ZERO: Annotated[float, Field(gt=0, description="Modulus below which a coordinate counts as zero")] = 1e-9
    NORM: Annotated[float, Field(gt=0, description="Allowed deviation of a unit vector's norm from one")] = 1e-9
    EQ: Annotated[float, Field(gt=0, description="Gap distance below which projections are equal")] = 1e-7
    VERIFY: Annotated[float, Field(gt=0, description="Max gap residual accepted for a witness")] = 1e-8

    @model_validator(mode="after")
    def validate_ordering(self) -> "Tolerances":
        """Validate that the zero threshold is strictly below the equality threshold."""
        if not self.ZERO < self.EQ:
            raise ValueError(f"ZERO ({self.ZERO}) must be strictly smaller than EQ ({self.EQ})")
        return self


DEFAULT_TOLERANCES = Tolerances()

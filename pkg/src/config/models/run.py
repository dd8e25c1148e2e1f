from typing import Annotated

from pydantic import BaseModel, Field


class RunDefaults(BaseModel):
    """
    Defaults for seeded experiment runs.

    Attributes
    ----------
    SAMPLES : int
        Number of random sample vectors (or pairs) used by verification and validation.
    SEED : int
        Base seed for every pseudo-random stream.
    WORKERS : int
        Number of threads used to evaluate samples; 1 keeps evaluation in the caller's thread.
    SCRAMBLE : bool
        Whether witness-induced black boxes multiply each output representative by a random phase.
    """

    SAMPLES: Annotated[int, Field(ge=1, description="Random samples used by verify/validate")] = 1000
    SEED: Annotated[int, Field(ge=0, lt=2**64, description="Base random seed")] = 0
    WORKERS: Annotated[int, Field(ge=1, description="Threads used to evaluate samples")] = 1
    SCRAMBLE: Annotated[bool, Field(description="Scramble output phases of induced black boxes")] = True

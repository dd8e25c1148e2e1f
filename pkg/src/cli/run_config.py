from enum import StrEnum
from pathlib import Path
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.models.tolerances import Tolerances
from symmetry.generators import GeneratorSpec


class Command(StrEnum):
    GENERATE = "generate"
    RECONSTRUCT = "reconstruct"
    VERIFY = "verify"
    VALIDATE = "validate"
    RESOLVE = "resolve"


class RunConfig(BaseModel):
    """
    Everything a single CLI run depends on.

    Attributes
    ----------
    command : Command
        The subcommand.
    generator : GeneratorSpec | None
        Instance to build when no ``input_path`` is given.
    input_path : Path | None
        Operator file with a witness, a generator record or (for ``resolve``) a vector.
    output_path : Path | None
        Where the operator file or report goes; stdout when absent.
    witness_path : Path | None
        Candidate witness checked by ``verify``.
    dim : int | None
        Dimension of the random element of D drawn by ``resolve`` when no vector file is given.
    samples : int
        Random vectors (``reconstruct``/``verify``) or pairs (``validate``) on top of the fixed fixtures.
    seed : int
        Seed of every random stream of the run.
    workers : int
        Threads evaluating samples.
    tolerances : Tolerances
        Effective numerical thresholds.
    """

    model_config = ConfigDict(frozen=True)

    command: Command
    generator: GeneratorSpec | None = None
    input_path: Path | None = None
    output_path: Path | None = None
    witness_path: Path | None = None
    dim: Annotated[int | None, Field(ge=1)] = None
    samples: Annotated[int, Field(ge=1)] = 1000
    seed: Annotated[int, Field(ge=0, lt=2**64)] = 0
    workers: Annotated[int, Field(ge=1)] = 1
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @model_validator(mode="after")
    def validate_inputs(self) -> "RunConfig":
        """Check that the command has the inputs it needs."""
        for name in ("input_path", "output_path", "witness_path"):
            path = getattr(self, name)
            if path is not None and not str(path).strip():
                raise ValueError(f"{name} must not be empty")
        match self.command:
            case Command.GENERATE:
                if self.generator is None:
                    raise ValueError("generate needs a generator spec (--kind and --n)")
            case Command.RECONSTRUCT | Command.VALIDATE | Command.VERIFY:
                if self.generator is None and self.input_path is None:
                    raise ValueError(f"{self.command} needs an instance: --in or --kind/--n")
                if self.command is Command.VERIFY and self.witness_path is None:
                    raise ValueError("verify needs a candidate witness (--witness)")
            case Command.RESOLVE:
                if self.input_path is None and self.dim is None:
                    raise ValueError("resolve needs a vector file (--in) or a dimension (--n)")
        return self

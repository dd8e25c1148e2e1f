"""
Operator files and reports.

Both are single JSON documents. Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of rows.
Floats are written in their shortest round-trip form, so reading a file back reproduces every entry bitwise; this
meets the same round-trip guarantee as fixed 17-significant-digit output.
"""

import os
import tempfile
from datetime import datetime
from enum import StrEnum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.models.tolerances import Tolerances
from symmetry.generators import GeneratedInstance, GeneratorKind, GeneratorSpec
from symmetry.hilbert import ComplexMatrix, ComplexVector, as_vector
from symmetry.reconstruct import IsometryWitness, Linearity, ReconstructionReport, as_matrix

ComplexPair = tuple[float, float]
MatrixEntries = list[list[ComplexPair]]


def encode_matrix(a: ComplexMatrix) -> MatrixEntries:
    return [[(float(z.real), float(z.imag)) for z in row] for row in np.asarray(a)]


def decode_matrix(entries: MatrixEntries) -> ComplexMatrix:
    return as_matrix([[complex(re, im) for re, im in row] for row in entries])


class OperatorKind(StrEnum):
    WITNESS = "witness"
    VECTOR = "vector"
    GENERATOR = "generator"


class OperatorMeta(BaseModel):
    """Provenance of an operator file. Unknown keys are kept."""

    model_config = ConfigDict(extra="allow", validate_by_name=True, validate_by_alias=True, serialize_by_alias=True)

    seed: int | None = Field(default=None, ge=0, lt=2**64)
    generator_kind: GeneratorKind | None = Field(default=None, alias="generator-kind")
    j: int | None = None
    scramble: bool | None = None


class OperatorRecord(BaseModel):
    """
    The operator file: a witness matrix, a vector (stored as an n x 1 column) or a generator recipe.

    A ``generator`` record carries no matrix; its instance is rebuilt from ``meta`` (used for maps that no witness
    induces, such as the partial-conjugation adversary).
    """

    model_config = ConfigDict(allow_inf_nan=False)

    kind: OperatorKind
    n: int = Field(ge=1)
    m: int = Field(ge=1)
    tag: Linearity = Linearity.LINEAR
    matrix: MatrixEntries | None = None
    meta: OperatorMeta = Field(default_factory=OperatorMeta)

    @model_validator(mode="after")
    def validate_shape(self) -> "OperatorRecord":
        if self.m < self.n:
            raise ValueError(f"m ({self.m}) must be at least n ({self.n})")
        if self.kind is OperatorKind.GENERATOR:
            if self.meta.generator_kind is None:
                raise ValueError("generator records need meta.generator-kind")
            return self
        if self.matrix is None:
            raise ValueError(f"{self.kind} records need a matrix")
        columns = 1 if self.kind is OperatorKind.VECTOR else self.n
        if self.kind is OperatorKind.VECTOR and self.m != self.n:
            raise ValueError("vector records need m = n")
        if len(self.matrix) != self.m or any(len(row) != columns for row in self.matrix):
            raise ValueError(f"matrix must have {self.m} rows of {columns} entries")
        return self

    def witness(self) -> IsometryWitness:
        if self.kind is not OperatorKind.WITNESS:
            raise ValueError(f"Expected a witness record, got {self.kind}")
        return IsometryWitness(matrix=decode_matrix(self.matrix or []), tag=self.tag)

    def vector(self) -> ComplexVector:
        if self.kind is not OperatorKind.VECTOR:
            raise ValueError(f"Expected a vector record, got {self.kind}")
        return as_vector(decode_matrix(self.matrix or [])[:, 0])

    def generator_spec(self) -> GeneratorSpec:
        if self.meta.generator_kind is None:
            raise ValueError("Record has no meta.generator-kind")
        return GeneratorSpec(
            kind=self.meta.generator_kind,
            n=self.n,
            m=self.m,
            seed=self.meta.seed or 0,
            j=self.meta.j,
            tag=self.tag,
            scramble=True if self.meta.scramble is None else self.meta.scramble,
        )

    @classmethod
    def from_witness(cls, W: IsometryWitness, meta: OperatorMeta | None = None) -> "OperatorRecord":
        return cls(
            kind=OperatorKind.WITNESS,
            n=W.n,
            m=W.m,
            tag=W.tag,
            matrix=encode_matrix(W.matrix),
            meta=meta or OperatorMeta(),
        )

    @classmethod
    def from_vector(cls, v: ComplexVector) -> "OperatorRecord":
        n = int(v.shape[0])
        return cls(kind=OperatorKind.VECTOR, n=n, m=n, matrix=encode_matrix(np.reshape(v, (n, 1))))

    @classmethod
    def from_instance(cls, instance: GeneratedInstance) -> "OperatorRecord":
        spec = instance.spec
        meta = OperatorMeta(seed=spec.seed, generator_kind=spec.kind, j=spec.j, scramble=spec.scramble)
        if instance.witness is not None:
            return cls.from_witness(instance.witness, meta)
        return cls(
            kind=OperatorKind.GENERATOR,
            n=spec.n,
            m=instance.symmetry.codomain_dim,
            tag=spec.tag,
            meta=meta,
        )


class ReportStatus(StrEnum):
    OK = "ok"
    FAILED = "failed"


class ReportRecord(BaseModel):
    """
    Machine-readable outcome of a run.

    Residual fields carry the names of :class:`symmetry.reconstruct.ReconstructionReport`; only the fields a command
    produces are written. ``timestamp`` is the only field that differs between identical runs.
    """

    model_config = ConfigDict(allow_inf_nan=False)

    command: str
    status: ReportStatus
    reason: str | None = None
    message: str | None = None
    timestamp: datetime
    tolerances: Tolerances
    seed: int | None = None
    samples: int | None = None

    domain_dim: int | None = None
    codomain_dim: int | None = None
    tag: Linearity | None = None
    witness: OperatorRecord | None = None
    max_gap_residual: float | None = None
    mean_gap_residual: float | None = None
    parseval_residual: float | None = None
    phase_relation_residual: float | None = None
    fixture_residual: float | None = None
    classification_evidence: tuple[float, float] | None = None
    sample_count: int | None = None

    transition_probability_residual: float | None = None
    gap_isometry_defect: float | None = None

    profile: list[float] | None = None
    recovered: list[ComplexPair] | None = None
    round_trip_residual: float | None = None

    @staticmethod
    def fields_of(report: ReconstructionReport) -> dict[str, Any]:
        """Return the report's residual fields, with the witness as an operator record."""
        fields = report.model_dump(exclude={"witness"})
        if report.witness is not None:
            fields["witness"] = OperatorRecord.from_witness(report.witness)
            fields["tag"] = report.witness.tag
        return fields

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=True, by_alias=True) + "\n"


def read_operator(path: Path) -> OperatorRecord:
    """
    Read an operator file.

    Raises
    ------
    OSError
        If the file cannot be read.
    pydantic.ValidationError
        If the file is not a well-formed operator record (including truncated JSON).
    """
    return OperatorRecord.model_validate_json(path.read_text(encoding="utf-8"))


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    with tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
    ) as handle:
        handle.write(text)
        tmp = Path(handle.name)
    try:
        os.replace(tmp, path)
    except OSError:
        tmp.unlink(missing_ok=True)
        raise


def write_operator(path: Path, record: OperatorRecord) -> None:
    write_atomic(path, record.model_dump_json(indent=2, by_alias=True) + "\n")

"""
Complex inner-product arithmetic on C^N and rank-one projections.

Conventions
-----------
* ``inner_product(v, w) = sum_k v_k * conj(w_k)``: linear in the first slot, conjugate-linear in the second.
* A projection P[v] is stored through its canonical representative: the unit vector whose first coordinate
  of modulus above ``Tolerances.ZERO`` is real and strictly positive.
* Coordinates are 0-based in code; docstrings that quote the usual notation (e_1, e_2, ...) are 1-based.
"""

from __future__ import annotations

from typing import Annotated, Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, BeforeValidator, ConfigDict, ValidationInfo, model_validator

from config.models.tolerances import DEFAULT_TOLERANCES, Tolerances
from symmetry.errors import DimensionError, InternalError, NonFiniteError, ZeroVectorError

ComplexVector = npt.NDArray[np.complex128]
ComplexMatrix = npt.NDArray[np.complex128]


def as_vector(coords: Any) -> ComplexVector:
    """
    Convert coordinates into a read-only, finite, one-dimensional complex128 array.

    Raises
    ------
    DimensionError
        If the input is not one-dimensional or is empty.
    NonFiniteError
        If a coordinate is NaN or infinite.
    """
    v = np.array(coords, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"Expected a non-empty 1-D coordinate array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError("Vector has non-finite coordinates")
    v.flags.writeable = False
    return v


FiniteVector = Annotated[np.ndarray, BeforeValidator(as_vector)]


class RankOneProjection(BaseModel):
    """
    A point of P_1(C^N), i.e. the projection onto C*rep.

    Instances are meant to be built with :func:`canonicalize`. Direct construction checks the unit-norm and
    canonical-phase invariants against the ``tol`` passed in the validation context (default tolerances otherwise).
    Two projections compare equal when their gap distance is at most the default ``Tolerances.EQ``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    rep: FiniteVector

    @property
    def dim(self) -> int:
        return int(self.rep.shape[0])

    def projector(self) -> ComplexMatrix:
        """Return the dense matrix |rep><rep|."""
        return np.outer(self.rep, self.rep.conj())

    @model_validator(mode="after")
    def validate_invariants(self, info: ValidationInfo) -> RankOneProjection:
        tol = (info.context or {}).get("tol", DEFAULT_TOLERANCES)
        try:
            self.check_invariants(tol)
        except InternalError as e:
            raise ValueError(str(e)) from e
        return self

    def check_invariants(self, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        """
        Check the unit-norm and canonical-phase invariants.

        Raises
        ------
        InternalError
            If the representative is not unit or not phase-canonical.
        """
        norm = float(np.linalg.norm(self.rep))
        if abs(norm - 1.0) > tol.NORM:
            raise InternalError(f"Representative has norm {norm!r}")
        lead = first_significant_index(self.rep, tol)
        if lead is None or self.rep[lead].imag != 0.0 or self.rep[lead].real <= 0.0:
            raise InternalError("Representative is not phase-canonical")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RankOneProjection):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return gap_distance(self, other) <= DEFAULT_TOLERANCES.EQ

    __hash__ = None  # type: ignore[assignment]


def _check_same_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"Dimension mismatch: {a} != {b}")


def first_significant_index(v: ComplexVector, tol: Tolerances = DEFAULT_TOLERANCES) -> int | None:
    """Return the index of the first coordinate with modulus above ``tol.ZERO`` (``None`` if there is none)."""
    significant = np.flatnonzero(np.abs(v) > tol.ZERO)
    return int(significant[0]) if significant.size else None


def inner_product(v: ComplexVector, w: ComplexVector) -> complex:
    """
    Return <v, w> = sum_k v_k conj(w_k).

    Raises
    ------
    DimensionError
        If the vectors have different lengths.
    """
    _check_same_dim(v.shape[0], w.shape[0])
    # vdot conjugates its first argument
    return complex(np.vdot(w, v))


def transition_probability(p: RankOneProjection, q: RankOneProjection) -> float:
    """Return tr P[v]P[w] = |<v, w>|^2, clipped to [0, 1]."""
    c = inner_product(p.rep, q.rep)
    return min(abs(c) ** 2, 1.0)


def gap_distance(p: RankOneProjection, q: RankOneProjection, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Return the gap metric ||P[v] - P[w]|| = sqrt(1 - |<v, w>|^2).

    The value is evaluated as ||v - w'|| * ||v + w'|| / 2 where w' is w rotated so that <v, w'> is real and
    non-negative (sin t = 2 sin(t/2) cos(t/2)). Forming 1 - |<v, w>|^2 directly would lose half of the
    significant digits for nearly equal projections.

    Raises
    ------
    DimensionError
        If the projections live in different dimensions.
    InternalError
        If 1 - |<v, w>|^2 is below ``-tol.ZERO`` (a representative is not unit).
    """
    v, w = p.rep, q.rep
    c = inner_product(v, w)
    modulus = abs(c)
    radicand = 1.0 - modulus**2
    if radicand < -tol.ZERO:
        raise InternalError(f"Negative radicand {radicand!r} in gap distance")

    aligned = w * (c / modulus) if modulus > 0.0 else w
    d = float(np.linalg.norm(v - aligned) * np.linalg.norm(v + aligned)) / 2.0
    return min(max(d, 0.0), 1.0)


def canonicalize(v: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> RankOneProjection:
    """
    Return P[v] with its canonical representative.

    The vector is normalised and rotated by a unit scalar so that its first coordinate of modulus above
    ``tol.ZERO`` becomes real and strictly positive. ``canonicalize(l * v) == canonicalize(v)`` for every unit
    scalar ``l``.

    Raises
    ------
    ZeroVectorError
        If ``||v|| <= tol.ZERO``.
    """
    u = np.array(as_vector(v))
    norm = float(np.linalg.norm(u))
    if norm <= tol.ZERO:
        raise ZeroVectorError(f"Cannot define a projection from a vector of norm {norm!r}")
    u /= norm

    lead = first_significant_index(u, tol)
    if lead is None:
        # Only reachable for dimensions around 1/ZERO**2
        raise ZeroVectorError("No coordinate is above the zero threshold after normalisation")
    modulus = abs(u[lead])
    u *= np.conj(u[lead]) / modulus
    u[lead] = modulus
    return RankOneProjection.model_validate({"rep": u}, context={"tol": tol})


def basis_vector(dim: int, k: int) -> ComplexVector:
    """Return e_{k+1} in C^dim."""
    if not 0 <= k < dim:
        raise DimensionError(f"Basis index {k} out of range for dimension {dim}")
    e = np.zeros(dim, dtype=np.complex128)
    e[k] = 1.0
    return e


def basis_projection(dim: int, k: int) -> RankOneProjection:
    return canonicalize(basis_vector(dim, k))


def random_unit_vector(dim: int, rng: np.random.Generator) -> ComplexVector:
    """Draw a unit vector uniformly from the sphere of C^dim (normalised standard complex Gaussian)."""
    if dim < 1:
        raise DimensionError(f"Dimension must be positive, got {dim}")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_domain_element(dim: int, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOLERANCES) -> RankOneProjection:
    """Draw a random projection whose representative has no coordinate of modulus <= ``tol.ZERO``."""
    while True:
        v = random_unit_vector(dim, rng)
        if np.all(np.abs(v) > tol.ZERO):
            return canonicalize(v, tol)

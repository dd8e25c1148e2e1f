"""
A finite set of projections that pins down every projection with no vanishing coordinate.

For the basis e_1..e_N the set

    R = {P[e_j]} + {P[(e_j - e_{j+1})/sqrt2], P[(e_j + i e_{j+1})/sqrt2] : 1 <= j < N}

has 3N - 2 elements. Distances to R determine |v_j|, |v_j - v_{j+1}| and |v_j - i v_{j+1}|; once v_1 is fixed real
positive, each v_{j+1} follows from v_j. The chain breaks at a zero coordinate, which is why only the dense set D of
projections with all coordinates non-zero is resolved: P[(e_1 + e_3)/sqrt2] and P[(e_1 + i e_3)/sqrt2] have the same
distances to every element of R but are far apart.
"""

from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.models.tolerances import DEFAULT_TOLERANCES, Tolerances
from symmetry.errors import DimensionError, InconsistentProfileError, NotInDomainError, ZeroPivotError
from symmetry.hilbert import (
    RankOneProjection,
    basis_projection,
    basis_vector,
    canonicalize,
    gap_distance,
    transition_probability,
)
from utils.logging_helpers import get_logger

logger = get_logger(__name__)

SQRT2 = np.sqrt(2.0)


class ResolvingSet(BaseModel):
    """
    The 3N-2 projections of R in canonical order.

    Attributes
    ----------
    dim : int
        Dimension N of the underlying space.
    elements : list[RankOneProjection]
        First P[e_1]..P[e_N], then for each j < N the pair P[(e_j - e_{j+1})/sqrt2], P[(e_j + i e_{j+1})/sqrt2].
    """

    dim: int = Field(ge=1)
    elements: list[RankOneProjection]

    @model_validator(mode="after")
    def validate_size(self) -> "ResolvingSet":
        if len(self.elements) != 3 * self.dim - 2:
            raise ValueError(f"A resolving set in dimension {self.dim} has {3 * self.dim - 2} elements")
        if any(h.dim != self.dim for h in self.elements):
            raise ValueError("All elements must live in the set's dimension")
        return self

    @property
    def basis(self) -> list[RankOneProjection]:
        return self.elements[: self.dim]

    def pair(self, j: int) -> tuple[RankOneProjection, RankOneProjection]:
        """Return the (difference, i-difference) pair coupling coordinates ``j`` and ``j + 1`` (0-based)."""
        offset = self.dim + 2 * j
        return self.elements[offset], self.elements[offset + 1]


class DistanceProfile(BaseModel):
    """
    Moduli read off the distances of a projection to the elements of R.

    ``moduli_basis[j] = |v_j|``, ``moduli_diff[j] = |v_j - v_{j+1}|`` and ``moduli_idiff[j] = |v_j - i v_{j+1}|``; the
    1/sqrt2 normalisation of the pair elements is already undone.
    """

    model_config = ConfigDict(frozen=True)

    dim: int = Field(ge=1)
    moduli_basis: list[float]
    moduli_diff: list[float]
    moduli_idiff: list[float]

    @model_validator(mode="after")
    def validate_lengths(self) -> "DistanceProfile":
        if len(self.moduli_basis) != self.dim:
            raise ValueError(f"Expected {self.dim} basis moduli, got {len(self.moduli_basis)}")
        if len(self.moduli_diff) != self.dim - 1 or len(self.moduli_idiff) != self.dim - 1:
            raise ValueError(f"Expected {self.dim - 1} moduli per neighbour pair list")
        if min(self.as_array(), default=0.0) < 0.0:
            raise ValueError("Moduli must be non-negative")
        return self

    def as_array(self) -> np.ndarray:
        """Return all 3N-2 readings in the order of the resolving set."""
        pairs = np.column_stack([self.moduli_diff, self.moduli_idiff]).reshape(-1) if self.dim > 1 else []
        return np.concatenate([np.asarray(self.moduli_basis, dtype=float), np.asarray(pairs, dtype=float)])

    def max_difference(self, other: "DistanceProfile") -> float:
        """Return the largest entrywise difference between two profiles of the same dimension."""
        if self.dim != other.dim:
            raise DimensionError(f"Dimension mismatch: {self.dim} != {other.dim}")
        return float(np.max(np.abs(self.as_array() - other.as_array())))


def build_resolving_set(n: int) -> ResolvingSet:
    """
    Build R for C^n.

    Raises
    ------
    DimensionError
        If ``n < 1``.
    """
    if n < 1:
        raise DimensionError(f"Dimension must be positive, got {n}")
    elements = [basis_projection(n, k) for k in range(n)]
    for j in range(n - 1):
        e_j, e_next = basis_vector(n, j), basis_vector(n, j + 1)
        elements.append(canonicalize((e_j - e_next) / SQRT2))
        elements.append(canonicalize((e_j + 1j * e_next) / SQRT2))
    return ResolvingSet(dim=n, elements=elements)


def profile_of(p: RankOneProjection, resolving_set: ResolvingSet) -> DistanceProfile:
    """
    Return the distance profile of ``p`` against ``resolving_set``.

    A gap reading d to P[h] carries the modulus |<v, h>| = sqrt(1 - d^2) = sqrt(tr P[v]P[h]); the modulus is taken
    from the transition probability directly so that readings near zero keep full precision.

    Raises
    ------
    DimensionError
        If ``p`` and the set live in different dimensions.
    """
    n = resolving_set.dim
    if p.dim != n:
        raise DimensionError(f"Dimension mismatch: {p.dim} != {n}")
    moduli = [np.sqrt(transition_probability(p, h)) for h in resolving_set.elements]
    pair_moduli = np.asarray(moduli[n:], dtype=float).reshape(-1, 2) * SQRT2
    return DistanceProfile(
        dim=n,
        moduli_basis=[float(x) for x in moduli[:n]],
        moduli_diff=[float(x) for x in pair_moduli[:, 0]],
        moduli_idiff=[float(x) for x in pair_moduli[:, 1]],
    )


def recover_next_coordinate(
    v_k: complex,
    m: float,
    m_diff: float,
    m_idiff: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> complex:
    """
    Return the unique b with |b| = m, |v_k - b| = m_diff and |v_k - i b| = m_idiff.

    With z = v_k conj(b) the two difference moduli are linear in Re z and Im z:

        m_diff^2  = |v_k|^2 + m^2 - 2 Re z
        m_idiff^2 = |v_k|^2 + m^2 - 2 Im z

    so b = conj(z) v_k / |v_k|^2. Errors in the moduli are amplified by roughly 1/|v_k|.

    Raises
    ------
    ZeroPivotError
        If ``|v_k| <= tol.ZERO``.
    InconsistentProfileError
        If the recovered b does not have modulus m within ``tol.EQ``.
    """
    pivot = abs(v_k)
    if pivot <= tol.ZERO:
        raise ZeroPivotError(f"Cannot chain from a coordinate of modulus {pivot!r}")
    base = pivot**2 + m**2
    z = complex((base - m_diff**2) / 2.0, (base - m_idiff**2) / 2.0)
    b = z.conjugate() * v_k / pivot**2
    if abs(abs(b) - m) > tol.EQ:
        raise InconsistentProfileError(f"Recovered coordinate has modulus {abs(b)!r}, profile says {m!r}")
    return b


def recover_from_profile(profile: DistanceProfile, tol: Tolerances = DEFAULT_TOLERANCES) -> RankOneProjection:
    """
    Invert :func:`profile_of` on the dense set D.

    The first coordinate is fixed real positive and the rest are chained with :func:`recover_next_coordinate`.

    Raises
    ------
    NotInDomainError
        If some basis modulus is ``<= tol.ZERO``: the projection is outside D, where distances to R no longer
        determine it (e.g. P[(e_1 + e_3)/sqrt2] vs. P[(e_1 + i e_3)/sqrt2]).
    InconsistentProfileError
        If the basis moduli are not a unit vector's or a chain step is inconsistent.
    """
    basis = np.asarray(profile.moduli_basis, dtype=float)
    vanishing = np.flatnonzero(basis <= tol.ZERO)
    if vanishing.size:
        raise NotInDomainError(
            f"Coordinate {int(vanishing[0]) + 1} vanishes: the projection is not in D, "
            "and distances to the resolving set do not determine it"
        )
    norm_defect = abs(float(np.sum(basis**2)) - 1.0)
    if norm_defect > tol.EQ:
        raise InconsistentProfileError(f"Basis moduli do not describe a unit vector (defect {norm_defect!r})")

    v = np.empty(profile.dim, dtype=np.complex128)
    v[0] = basis[0]
    for k in range(profile.dim - 1):
        v[k + 1] = recover_next_coordinate(
            complex(v[k]), float(basis[k + 1]), profile.moduli_diff[k], profile.moduli_idiff[k], tol
        )
    return canonicalize(v, tol)


def profiles_agree(a: DistanceProfile, b: DistanceProfile, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return a.max_difference(b) <= tol.EQ


def is_in_domain(p: RankOneProjection, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Return whether every coordinate of ``p``'s representative has modulus above ``tol.ZERO``."""
    return bool(np.all(np.abs(p.rep) > tol.ZERO))


def fixes_resolving_set(
    query: Callable[[RankOneProjection], RankOneProjection],
    resolving_set: ResolvingSet,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Return max over h in R of the gap between query(P[h]) and P[h].

    A map preserving transition probabilities that fixes R up to ``tol.EQ`` fixes all of D, hence all of P_1.
    """
    residuals: Sequence[float] = [gap_distance(query(h), h, tol) for h in resolving_set.elements]
    worst = max(residuals)
    logger.debug("Resolving set residual %.3e over %d elements", worst, len(residuals))
    return worst

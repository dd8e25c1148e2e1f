"""
Instance factory: black boxes built from known witnesses, plus two maps that are not symmetries.

Every generator is a pure function of its parameters and seed. Witness-induced black boxes multiply each image by
a per-query unit phase, so code downstream only ever sees projections and never a convenient representative.
"""

from enum import StrEnum
from hashlib import blake2b

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.models.tolerances import DEFAULT_TOLERANCES, Tolerances
from symmetry.errors import DimensionError
from symmetry.hilbert import ComplexMatrix, ComplexVector, RankOneProjection, basis_projection, canonicalize
from symmetry.reconstruct import IsometryWitness, Linearity, SymmetryMap
from utils.logging_helpers import get_logger

logger = get_logger(__name__)


class GeneratorKind(StrEnum):
    HAAR_UNITARY = "haar_unitary"
    HAAR_ANTIUNITARY = "haar_antiunitary"
    RANDOM_ISOMETRY = "random_isometry"
    SHIFT = "shift"
    PARTIAL_CONJUGATION = "partial_conjugation"
    CONSTANT = "constant"
    TIME_REVERSAL = "time_reversal"


class GeneratorSpec(BaseModel):
    """
    Parameters of a generated instance.

    Attributes
    ----------
    kind : GeneratorKind
        Which family to draw from.
    n : int
        Domain dimension N.
    m : int | None
        Codomain dimension M. Defaults to N, or N + 1 for ``shift``.
    seed : int
        Seed of the witness and of the per-query phase scrambling.
    j : int | None
        1-based index of the first coordinate pair treated antilinearly (``partial_conjugation`` only).
    tag : Linearity
        Linearity of a ``random_isometry`` witness.
    scramble : bool
        Whether witness-induced black boxes rotate each image by a random unit phase.
    """

    model_config = ConfigDict(frozen=True)

    kind: GeneratorKind
    n: int = Field(ge=1)
    m: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    j: int | None = None
    tag: Linearity = Linearity.LINEAR
    scramble: bool = True


class GeneratedInstance(BaseModel):
    """A black box together with the witness that induces it, when there is one."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: GeneratorSpec
    symmetry: SymmetryMap
    witness: IsometryWitness | None = None


def _haar_columns(m: int, n: int, rng: np.random.Generator) -> ComplexMatrix:
    # QR of a complex Ginibre matrix; rescaling column k by R_kk/|R_kk| makes Q Haar distributed
    z = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases


def haar_random_witness(n: int, tag: Linearity, seed: int) -> IsometryWitness:
    """
    Draw an N x N Haar-random unitary (or antiunitary, for ``tag=ANTILINEAR``) witness.

    Raises
    ------
    DimensionError
        If ``n < 1``.
    """
    if n < 1:
        raise DimensionError(f"Dimension must be positive, got {n}")
    return IsometryWitness(matrix=_haar_columns(n, n, np.random.default_rng(seed)), tag=tag)


def random_isometry_witness(n: int, m: int, tag: Linearity, seed: int) -> IsometryWitness:
    """
    Draw an M x N witness with orthonormal columns, the first N columns of a Haar unitary on C^M.

    Raises
    ------
    DimensionError
        If ``m < n``: there is no isometry into a smaller space.
    """
    if n < 1:
        raise DimensionError(f"Dimension must be positive, got {n}")
    if m < n:
        raise DimensionError(f"No isometry maps C^{n} into C^{m}")
    return IsometryWitness(matrix=_haar_columns(m, n, np.random.default_rng(seed)), tag=tag)


def shift_witness(n: int) -> IsometryWitness:
    """Return the (N+1) x N truncated unilateral shift e_k -> e_{k+1}, a linear isometry that is not unitary."""
    if n < 1:
        raise DimensionError(f"Dimension must be positive, got {n}")
    return IsometryWitness(matrix=np.eye(n + 1, n, k=-1, dtype=np.complex128), tag=Linearity.LINEAR)


def time_reversal_witness(n: int) -> IsometryWitness:
    """Return complex conjugation in the fixed basis as an antiunitary witness."""
    if n < 1:
        raise DimensionError(f"Dimension must be positive, got {n}")
    return IsometryWitness(matrix=np.eye(n, dtype=np.complex128), tag=Linearity.ANTILINEAR)


def _scramble_phase(seed: int, rep: ComplexVector) -> complex:
    # Counter-based stream keyed by the seed and positioned by the query, so concurrent calls agree
    counter = int.from_bytes(blake2b(rep.tobytes(), digest_size=32).digest(), "little")
    rng = np.random.Generator(np.random.Philox(key=seed, counter=counter))
    return complex(np.exp(2j * np.pi * rng.random()))


def symmetry_from_witness(
    W: IsometryWitness,
    scramble_seed: int,
    scramble: bool = True,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SymmetryMap:
    """
    Return the black box P[v] -> P[mu * W v].

    ``mu`` is a unit phase drawn per query from ``scramble_seed`` and the queried projection; it does not change the
    image projection, only the vector the canonicalisation starts from. With ``scramble=False`` ``mu = 1``.
    """

    def query(p: RankOneProjection) -> RankOneProjection:
        image = W.apply(p.rep)
        if scramble:
            image = image * _scramble_phase(scramble_seed, p.rep)
        return canonicalize(image, tol)

    return SymmetryMap(domain_dim=W.n, codomain_dim=W.m, query=query, label=f"{W.tag} witness {W.m}x{W.n}")


def partial_conjugation_adversary(n: int, j: int, tol: Tolerances = DEFAULT_TOLERANCES) -> SymmetryMap:
    """
    Return the map that conjugates coordinates j+1, ..., N (1-based) and leaves the others alone.

    The representative is first rotated so that its e_j coordinate is real positive (the canonical one is used when
    that coordinate vanishes). The map fixes every P[e_k] and every real-coefficient pair projection, and sends
    P[(e_j + i e_{j+1})/sqrt2] to P[(e_j - i e_{j+1})/sqrt2]. It is not a symmetry: on the contradiction pair the
    inner-product modulus jumps from sqrt2/4 to sqrt10/4.

    Raises
    ------
    DimensionError
        Unless ``n >= 3`` and ``2 <= j <= n - 1``.
    """
    if n < 3 or not 2 <= j <= n - 1:
        raise DimensionError(f"Partial conjugation needs n >= 3 and 2 <= j <= n-1, got n={n}, j={j}")

    def query(p: RankOneProjection) -> RankOneProjection:
        v = np.array(p.rep)
        pivot = v[j - 1]
        if abs(pivot) > tol.ZERO:
            v *= np.conj(pivot) / abs(pivot)
        v[j:] = np.conj(v[j:])
        return canonicalize(v, tol)

    return SymmetryMap(domain_dim=n, codomain_dim=n, query=query, label=f"partial conjugation from j={j}")


def constant_map(n: int) -> SymmetryMap:
    """Return the map sending every projection to P[e_1]; it collapses orthogonal pairs."""
    if n < 1:
        raise DimensionError(f"Dimension must be positive, got {n}")
    target = basis_projection(n, 0)
    return SymmetryMap(domain_dim=n, codomain_dim=n, query=lambda _: target, label="constant")


def _require_square(spec: GeneratorSpec) -> None:
    if spec.m is not None and spec.m != spec.n:
        raise DimensionError(f"{spec.kind} needs m = n, got n={spec.n}, m={spec.m}")


def instantiate(spec: GeneratorSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> GeneratedInstance:
    """
    Build the instance described by ``spec``.

    Raises
    ------
    DimensionError
        If the dimensions (or ``j``) do not fit the generator kind.
    """
    witness: IsometryWitness | None
    match spec.kind:
        case GeneratorKind.HAAR_UNITARY | GeneratorKind.HAAR_ANTIUNITARY:
            _require_square(spec)
            tag = Linearity.LINEAR if spec.kind is GeneratorKind.HAAR_UNITARY else Linearity.ANTILINEAR
            witness = haar_random_witness(spec.n, tag, spec.seed)
        case GeneratorKind.RANDOM_ISOMETRY:
            witness = random_isometry_witness(spec.n, spec.m or spec.n, spec.tag, spec.seed)
        case GeneratorKind.SHIFT:
            if spec.m is not None and spec.m != spec.n + 1:
                raise DimensionError(f"shift needs m = n + 1, got n={spec.n}, m={spec.m}")
            witness = shift_witness(spec.n)
        case GeneratorKind.TIME_REVERSAL:
            _require_square(spec)
            witness = time_reversal_witness(spec.n)
        case GeneratorKind.PARTIAL_CONJUGATION:
            _require_square(spec)
            if spec.j is None:
                raise DimensionError("partial_conjugation needs j")
            symmetry = partial_conjugation_adversary(spec.n, spec.j, tol)
            return GeneratedInstance(spec=spec, symmetry=symmetry)
        case GeneratorKind.CONSTANT:
            _require_square(spec)
            return GeneratedInstance(spec=spec, symmetry=constant_map(spec.n))

    symmetry = symmetry_from_witness(witness, spec.seed, spec.scramble, tol)
    logger.debug("Instantiated %s (n=%d, m=%d, seed=%d)", spec.kind, witness.n, witness.m, spec.seed)
    return GeneratedInstance(spec=spec, symmetry=symmetry, witness=witness)

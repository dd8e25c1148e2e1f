"""
Reconstruction of the isometry behind a transition-probability preserving map.

Given a black box ``f: P_1(C^N) -> P_1(C^M)`` the pipeline is

1. frame     g_j = representative of f(P[e_j]); the g_j are orthonormal.
2. V         the linear isometry e_j -> g_j.
3. pullback  g(P) = P[V* rep(f(P))]; every image of f lies in span{g_j}, so g maps P_1(C^N) into itself and
             fixes every P[e_j].
4. phases    g(P[(e_j - e_{j+1})/sqrt2]) = P[(e_j - d e_{j+1})/sqrt2] and
             g(P[(e_j + i e_{j+1})/sqrt2]) = P[(e_j - t e_{j+1})/sqrt2] with unit d, t and |1 + d conj(t)| = sqrt2.
5. class     t_2 = -i d_2 for maps induced by linear isometries, t_2 = +i d_2 for antilinear ones.
6. U         diag(1, d_2, d_2 d_3, ...), linear or antilinear according to step 5.
7. W         V U, checked against f on random vectors, the resolving set and the contradiction fixtures.

A map that behaves linearly on the first coordinate pair but antilinearly further on passes steps 1-6 and is
caught by step 7.
"""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from typing import Annotated, Any

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.models.tolerances import DEFAULT_TOLERANCES, Tolerances
from symmetry.errors import (
    DimensionError,
    NonFiniteError,
    NotASymmetryError,
    ParsevalError,
    PhaseRelationError,
    VerificationError,
)
from symmetry.hilbert import (
    ComplexMatrix,
    ComplexVector,
    FiniteVector,
    RankOneProjection,
    as_vector,
    basis_projection,
    basis_vector,
    canonicalize,
    first_significant_index,
    gap_distance,
    random_unit_vector,
    transition_probability,
)
from symmetry.resolving import build_resolving_set
from utils.logging_helpers import ProgressStage, get_logger, log_progress

logger = get_logger(__name__)

SQRT2 = np.sqrt(2.0)


class Linearity(StrEnum):
    LINEAR = "linear"
    ANTILINEAR = "antilinear"


def as_matrix(entries: Any) -> ComplexMatrix:
    """Convert entries into a read-only, finite, two-dimensional complex128 array."""
    a = np.array(entries, dtype=np.complex128)
    if a.ndim != 2 or a.size == 0:
        raise DimensionError(f"Expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("Matrix has non-finite entries")
    a.flags.writeable = False
    return a


FiniteMatrix = Annotated[np.ndarray, BeforeValidator(as_matrix)]


class IsometryWitness(BaseModel):
    """
    An M x N matrix with orthonormal columns and a linearity tag.

    ``apply(v)`` is ``A @ v`` for linear witnesses and ``A @ conj(v)`` for antilinear ones (conjugation in the fixed
    basis first, then the matrix).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    matrix: FiniteMatrix
    tag: Linearity = Linearity.LINEAR

    @field_validator("matrix")
    @classmethod
    def validate_orthonormal_columns(cls, v: ComplexMatrix) -> ComplexMatrix:
        """Reject matrices whose columns are not orthonormal within the default ``EQ``."""
        m, n = v.shape
        if m < n:
            raise ValueError(f"A {m}x{n} matrix cannot have orthonormal columns")
        defect = float(np.max(np.abs(v.conj().T @ v - np.eye(n))))
        if defect > DEFAULT_TOLERANCES.EQ:
            raise ValueError(f"Columns are not orthonormal: max |W*W - I| = {defect:.3e}")
        return v

    @property
    def m(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n(self) -> int:
        return int(self.matrix.shape[1])

    def apply(self, v: ComplexVector) -> ComplexVector:
        if v.shape[0] != self.n:
            raise DimensionError(f"Witness acts on C^{self.n}, got a vector of length {v.shape[0]}")
        return self.matrix @ (np.conj(v) if self.tag is Linearity.ANTILINEAR else v)

    def isometry_defect(self) -> float:
        """Return max |W*W - I| entrywise."""
        gram = self.matrix.conj().T @ self.matrix
        return float(np.max(np.abs(gram - np.eye(self.n))))


class SymmetryMap(BaseModel):
    """
    A black box P_1(C^N) -> P_1(C^M), assumed (not enforced) to preserve transition probabilities.

    Calling the map checks the input and output dimensions around ``query``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    domain_dim: int = Field(ge=1)
    codomain_dim: int = Field(ge=1)
    query: Callable[[RankOneProjection], RankOneProjection]
    label: str = ""

    @model_validator(mode="after")
    def validate_dims(self) -> "SymmetryMap":
        if self.codomain_dim < self.domain_dim:
            raise ValueError(f"Codomain dimension {self.codomain_dim} is below domain dimension {self.domain_dim}")
        return self

    def __call__(self, p: RankOneProjection) -> RankOneProjection:
        if p.dim != self.domain_dim:
            raise DimensionError(f"Map acts on C^{self.domain_dim}, got a projection in C^{p.dim}")
        image = self.query(p)
        if image.dim != self.codomain_dim:
            raise DimensionError(f"Map {self.label!r} returned a projection in C^{image.dim}, expected {self.codomain_dim}")
        return image


class Frame(BaseModel):
    """Representatives g_1..g_N of the images of the basis projections; an orthonormal system in C^M."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vectors: list[FiniteVector]

    @property
    def matrix(self) -> ComplexMatrix:
        return np.column_stack(self.vectors)

    def gram_defect(self) -> float:
        f = self.matrix
        return float(np.max(np.abs(f.conj().T @ f - np.eye(f.shape[1]))))


class PhaseChain(BaseModel):
    """
    Unit scalars d_{j+1} (``delta``) and t_{j+1} (``epsilon``) read off the neighbour pairs, j = 1..N-1.

    Empty for N = 1.
    """

    delta: list[complex]
    epsilon: list[complex]

    @model_validator(mode="after")
    def validate_lengths(self) -> "PhaseChain":
        if len(self.delta) != len(self.epsilon):
            raise ValueError("delta and epsilon must have the same length")
        return self

    def relation_residual(self) -> float:
        """Return max over j of | |1 + d conj(t)| - sqrt2 |."""
        if not self.delta:
            return 0.0
        d, t = np.asarray(self.delta), np.asarray(self.epsilon)
        return float(np.max(np.abs(np.abs(1.0 + d * np.conj(t)) - SQRT2)))

    def classification_evidence(self) -> tuple[float, float]:
        """Return (|t_2 - i d_2|, |t_2 + i d_2|); (0, 0) when there is no pair."""
        if not self.delta:
            return 0.0, 0.0
        d, t = self.delta[0], self.epsilon[0]
        return abs(t - 1j * d), abs(t + 1j * d)


class ReconstructionReport(BaseModel):
    """Outcome of :func:`reconstruct`: the witness and every residual it was checked with."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    witness: IsometryWitness | None
    domain_dim: int
    codomain_dim: int
    max_gap_residual: float = Field(ge=0)
    mean_gap_residual: float = Field(ge=0)
    parseval_residual: float = Field(ge=0)
    phase_relation_residual: float = Field(ge=0)
    fixture_residual: float = Field(ge=0)
    classification_evidence: tuple[float, float]
    sample_count: int


def extract_frame(f: SymmetryMap, tol: Tolerances = DEFAULT_TOLERANCES) -> Frame:
    """
    Read g_j from f(P[e_j]).

    Raises
    ------
    NotASymmetryError
        If the g_j are not orthonormal within ``tol.EQ``.
    """
    n = f.domain_dim
    frame = Frame(vectors=[f(basis_projection(n, k)).rep for k in range(n)])
    defect = frame.gram_defect()
    if defect > tol.EQ:
        raise NotASymmetryError(f"Images of the basis projections are not orthogonal (Gram defect {defect:.3e})")
    return frame


def build_V(frame: Frame) -> IsometryWitness:
    """Return the linear isometry e_j -> g_j."""
    try:
        return IsometryWitness(matrix=frame.matrix, tag=Linearity.LINEAR)
    except ValidationError as e:
        raise NotASymmetryError(f"Frame does not define an isometry: {e.errors()[0]['msg']}") from e


def parseval_check(w: ComplexVector, frame: Frame) -> float:
    """
    Return |1 - sum_j |<w, g_j>|^2| for a unit vector w.

    Zero (up to rounding) exactly when w lies in the span of the frame.
    """
    f = frame.matrix
    if w.shape[0] != f.shape[0]:
        raise DimensionError(f"Dimension mismatch: {w.shape[0]} != {f.shape[0]}")
    coefficients = f.conj().T @ w
    return abs(1.0 - float(np.sum(np.abs(coefficients) ** 2)))


def pullback(f: SymmetryMap, V: IsometryWitness, tol: Tolerances = DEFAULT_TOLERANCES) -> SymmetryMap:
    """
    Return the map g(P) = P[V* rep(f(P))] on P_1(C^N).

    Each image is first checked to lie in the span of V's columns.

    Raises
    ------
    ParsevalError
        From queries of the returned map, when an image of f leaves span(frame).
    NotASymmetryError
        If the returned map does not fix a basis projection.
    """
    frame = Frame(vectors=list(V.matrix.T))
    adjoint = V.matrix.conj().T

    def query(p: RankOneProjection) -> RankOneProjection:
        w = f(p).rep
        residual = parseval_check(w, frame)
        if residual > tol.EQ:
            raise ParsevalError(f"Image leaves the span of the frame (Parseval residual {residual:.3e})")
        return canonicalize(adjoint @ w, tol)

    g = SymmetryMap(domain_dim=V.n, codomain_dim=V.n, query=query, label=f"pullback({f.label})")
    for k in range(V.n):
        e_k = basis_projection(V.n, k)
        if gap_distance(g(e_k), e_k, tol) > tol.EQ:
            raise NotASymmetryError(f"Pulled-back map moves P[e_{k + 1}]")
    return g


def _read_pair_phase(u: ComplexVector, j: int, tol: Tolerances) -> complex:
    """Rotate u so that u_j > 0 and return s with u = (e_j - s e_{j+1})/sqrt2 (0-based j)."""
    pivot = u[j]
    if abs(abs(pivot) - 1.0 / SQRT2) > tol.EQ:
        raise NotASymmetryError(f"Pair image has modulus {abs(pivot):.6f} on coordinate {j + 1}, expected 1/sqrt2")
    u = u * (np.conj(pivot) / abs(pivot))
    outside = np.delete(np.abs(u), [j, j + 1])
    if outside.size and float(np.max(outside)) > tol.EQ:
        raise NotASymmetryError(f"Pair image has support outside coordinates {j + 1}, {j + 2}")
    s = complex(-SQRT2 * u[j + 1])
    if abs(abs(s) - 1.0) > tol.EQ:
        raise NotASymmetryError(f"Pair image phase has modulus {abs(s):.6f}")
    return s / abs(s)


def extract_phase_chain(g: SymmetryMap, tol: Tolerances = DEFAULT_TOLERANCES) -> PhaseChain:
    """
    Read (d_{j+1}, t_{j+1}) from the images of the neighbour pairs of the resolving set.

    ``g`` must fix every P[e_j] (the output of :func:`pullback`).

    Raises
    ------
    NotASymmetryError
        If a pair image is not of the form P[(e_j - s e_{j+1})/sqrt2] with |s| = 1.
    PhaseRelationError
        If |1 + d conj(t)| differs from sqrt2 by more than ``tol.EQ``.
    """
    resolving_set = build_resolving_set(g.domain_dim)
    delta, epsilon = [], []
    for j in range(g.domain_dim - 1):
        diff, idiff = resolving_set.pair(j)
        d = _read_pair_phase(g(diff).rep, j, tol)
        t = _read_pair_phase(g(idiff).rep, j, tol)
        relation = abs(1.0 + d * t.conjugate())
        if abs(relation - SQRT2) > tol.EQ:
            raise PhaseRelationError(f"|1 + d conj(t)| = {relation:.9f} at pair {j + 1}, expected sqrt2")
        delta.append(d)
        epsilon.append(t)
    return PhaseChain(delta=delta, epsilon=epsilon)


def classify_linearity(chain: PhaseChain, tol: Tolerances = DEFAULT_TOLERANCES) -> Linearity:
    """
    Decide from the first pair whether the map is induced by a linear or an antilinear isometry.

    t_2 = -i d_2 means linear, t_2 = +i d_2 means antilinear. For N = 1 there is nothing to decide and the
    result is linear.

    Raises
    ------
    PhaseRelationError
        If t_2 is neither -i d_2 nor +i d_2 within ``tol.EQ``.
    """
    if not chain.delta:
        return Linearity.LINEAR
    minus_i, plus_i = chain.classification_evidence()
    if min(minus_i, plus_i) > tol.EQ:
        raise PhaseRelationError(f"t_2 is neither +i d_2 nor -i d_2 (evidence {minus_i:.3e}, {plus_i:.3e})")
    return Linearity.LINEAR if plus_i <= minus_i else Linearity.ANTILINEAR


def build_U(chain: PhaseChain, tag: Linearity) -> IsometryWitness:
    """Return diag(1, d_2, d_2 d_3, ...) with the given tag."""
    diagonal = np.cumprod(np.concatenate([[1.0 + 0.0j], np.asarray(chain.delta, dtype=np.complex128)]))
    return IsometryWitness(matrix=np.diag(diagonal), tag=tag)


def compose_witness(V: IsometryWitness, U: IsometryWitness) -> IsometryWitness:
    """
    Return W = V U carrying U's tag.

    Raises
    ------
    DimensionError
        If U is not square of V's domain dimension.
    """
    if U.m != U.n or U.m != V.n:
        raise DimensionError(f"Cannot compose a {V.m}x{V.n} witness with a {U.m}x{U.n} one")
    return IsometryWitness(matrix=V.matrix @ U.matrix, tag=U.tag)


def fix_gauge(W: IsometryWitness, tol: Tolerances = DEFAULT_TOLERANCES) -> IsometryWitness:
    """Multiply W by the unit scalar that makes the first significant entry of its first column real positive."""
    first_column = W.matrix[:, 0]
    lead = first_significant_index(first_column, tol)
    if lead is None:
        return W
    phase = first_column[lead] / abs(first_column[lead])
    return IsometryWitness(matrix=W.matrix * np.conj(phase), tag=W.tag)


def contradiction_pair(n: int, j: int) -> tuple[ComplexVector, ComplexVector]:
    """
    Return x = -1/2 e_{j-1} + 1/2 e_j + 1/sqrt2 e_{j+1} and y = i/2 e_{j-1} + 1/2 e_j + i/sqrt2 e_{j+1}.

    ``j`` is 1-based, 2 <= j <= n-1. |<x, y>| = sqrt2/4, but conjugating the (j+1)-st coordinate of both turns it
    into sqrt10/4.
    """
    if not 2 <= j <= n - 1:
        raise DimensionError(f"Contradiction pair needs 2 <= j <= n-1, got j={j}, n={n}")
    x = -0.5 * basis_vector(n, j - 2) + 0.5 * basis_vector(n, j - 1) + basis_vector(n, j) / SQRT2
    y = 0.5j * basis_vector(n, j - 2) + 0.5 * basis_vector(n, j - 1) + 1j * basis_vector(n, j) / SQRT2
    return x, y


def contradiction_moduli(f: SymmetryMap, j: int) -> tuple[float, float]:
    """Return (|<x, y>|, |<x', y'>|) for the contradiction pair at ``j`` and its image under f."""
    x, y = (canonicalize(v) for v in contradiction_pair(f.domain_dim, j))
    before = np.sqrt(transition_probability(x, y))
    after = np.sqrt(transition_probability(f(x), f(y)))
    return float(before), float(after)


def fixture_residual(f: SymmetryMap) -> float:
    """Return max over admissible j of the change in |<x, y>| on the contradiction pair (0 when N < 3)."""
    residuals = [abs(a - b) for a, b in (contradiction_moduli(f, j) for j in range(2, f.domain_dim))]
    return max(residuals, default=0.0)


def verification_samples(n: int, sample_count: int, seed: int) -> list[ComplexVector]:
    """Return ``sample_count`` seeded random unit vectors followed by the resolving set and contradiction pairs."""
    rng = np.random.default_rng(seed)
    samples = [random_unit_vector(n, rng) for _ in range(sample_count)]
    samples.extend(h.rep for h in build_resolving_set(n).elements)
    for j in range(2, n):
        samples.extend(contradiction_pair(n, j))
    return samples


def _fan_out(fn: Callable[[Any], Any], items: Sequence[Any], workers: int) -> list[Any]:
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _sample_residuals(
    f: SymmetryMap,
    W: IsometryWitness,
    frame: Frame | None,
    samples: Sequence[ComplexVector],
    workers: int,
    tol: Tolerances,
) -> tuple[np.ndarray, np.ndarray]:
    def evaluate(v: ComplexVector) -> tuple[float, float]:
        image = f(canonicalize(v, tol))
        gap = gap_distance(image, canonicalize(W.apply(as_vector(v)), tol), tol)
        parseval = parseval_check(image.rep, frame) if frame is not None else 0.0
        return gap, parseval

    results = np.asarray(_fan_out(evaluate, samples, workers), dtype=float).reshape(-1, 2)
    return results[:, 0], results[:, 1]


def verify_witness(
    f: SymmetryMap,
    W: IsometryWitness,
    samples: Sequence[ComplexVector],
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float]:
    """
    Return (max, mean) over the samples of the gap between f(P[v]) and P[W v].

    Raises
    ------
    DimensionError
        If the witness does not map C^N into C^M for f's dimensions.
    """
    if (W.m, W.n) != (f.codomain_dim, f.domain_dim):
        raise DimensionError(f"Witness is {W.m}x{W.n}, map is C^{f.domain_dim} -> C^{f.codomain_dim}")
    gaps, _ = _sample_residuals(f, W, None, samples, workers, tol)
    return float(np.max(gaps)), float(np.mean(gaps))


def reconstruct(
    f: SymmetryMap,
    sample_count: int,
    seed: int,
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ReconstructionReport:
    """
    Reconstruct the witness W with f(P[v]) = P[W v] and verify it.

    Parameters
    ----------
    f : SymmetryMap
        The black box.
    sample_count : int
        Number of seeded random unit vectors used for verification, on top of the deterministic fixtures.
    seed : int
        Seed of the verification samples.
    workers : int, optional
        Threads used to evaluate the samples.
    tol : Tolerances, optional
        Numerical thresholds.

    Returns
    -------
    ReconstructionReport
        Witness and residuals; ``max_gap_residual <= tol.VERIFY``.

    Raises
    ------
    NotASymmetryError, ParsevalError, PhaseRelationError
        When f visibly violates transition-probability preservation on the basis or on the resolving set.
    VerificationError
        When the witness does not reproduce f on the samples. The partial report is attached as ``.report``.
    """
    if sample_count < 1:
        raise ValueError(f"sample_count must be positive, got {sample_count}")
    n = f.domain_dim

    log_progress(logger, "extract_frame")
    frame = extract_frame(f, tol)
    V = build_V(frame)

    log_progress(logger, "phase_chain")
    g = pullback(f, V, tol)
    chain = extract_phase_chain(g, tol)
    tag = classify_linearity(chain, tol)
    W = fix_gauge(compose_witness(V, build_U(chain, tag)), tol)
    log_progress(logger, "compose_witness", ProgressStage.COMPLETED, tag=str(tag), isometry_defect=W.isometry_defect())

    log_progress(logger, "verify")
    samples = verification_samples(n, sample_count, seed)
    gaps, parseval = _sample_residuals(f, W, frame, samples, workers, tol)
    report = ReconstructionReport(
        witness=W,
        domain_dim=n,
        codomain_dim=f.codomain_dim,
        max_gap_residual=float(np.max(gaps)),
        mean_gap_residual=float(np.mean(gaps)),
        parseval_residual=float(np.max(parseval)),
        phase_relation_residual=chain.relation_residual(),
        fixture_residual=fixture_residual(f),
        classification_evidence=chain.classification_evidence(),
        sample_count=len(samples),
    )
    if report.max_gap_residual > tol.VERIFY:
        log_progress(logger, "verify", ProgressStage.FAILED, max_gap_residual=report.max_gap_residual)
        raise VerificationError(
            f"Witness misses f by a gap of {report.max_gap_residual:.3e} (threshold {tol.VERIFY:.1e})",
            report=report,
        )
    logger.info(
        "Reconstructed %s witness for %s",
        tag,
        f.label or "map",
        extra={"max_gap_residual": report.max_gap_residual, "tag": str(tag)},
    )
    return report


def _pair_residuals(
    f: SymmetryMap,
    pair_count: int,
    seed: int,
    workers: int,
    tol: Tolerances,
) -> tuple[np.ndarray, np.ndarray]:
    n = f.domain_dim
    rng = np.random.default_rng(seed)
    pairs = [(random_unit_vector(n, rng), random_unit_vector(n, rng)) for _ in range(pair_count)]
    pairs.extend((basis_vector(n, k), basis_vector(n, k + 1)) for k in range(n - 1))
    pairs.extend(contradiction_pair(n, j) for j in range(2, n))

    def evaluate(pair: tuple[ComplexVector, ComplexVector]) -> tuple[float, float]:
        p, q = (canonicalize(v, tol) for v in pair)
        fp, fq = f(p), f(q)
        return (
            abs(transition_probability(p, q) - transition_probability(fp, fq)),
            abs(gap_distance(p, q, tol) - gap_distance(fp, fq, tol)),
        )

    results = np.asarray(_fan_out(evaluate, pairs, workers), dtype=float).reshape(-1, 2)
    return results[:, 0], results[:, 1]


def validation_residuals(
    f: SymmetryMap,
    pair_count: int,
    seed: int,
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float]:
    """Return the maxima of the transition-probability and gap-distance changes over one shared set of pairs."""
    tp_residuals, gap_residuals = _pair_residuals(f, pair_count, seed, workers, tol)
    return float(np.max(tp_residuals)), float(np.max(gap_residuals))


def validate_symmetry(
    f: SymmetryMap,
    pair_count: int,
    seed: int,
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Return max |tr P[v]P[w] - tr f(P[v])f(P[w])| over seeded random pairs and deterministic fixtures.

    The fixtures are the neighbouring basis pairs (e_k, e_{k+1}) and the contradiction pair for every admissible j.
    """
    return validation_residuals(f, pair_count, seed, workers, tol)[0]


def gap_isometry_defect(
    f: SymmetryMap,
    pair_count: int,
    seed: int,
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Return max |d(p, q) - d(f p, f q)| over the pairs used by :func:`validate_symmetry`."""
    return validation_residuals(f, pair_count, seed, workers, tol)[1]

import numpy as np
import pytest
from pydantic import ValidationError

from symmetry.errors import DimensionError, NotASymmetryError, ParsevalError, PhaseRelationError, VerificationError
from symmetry.generators import (
    haar_random_witness,
    partial_conjugation_adversary,
    random_isometry_witness,
    shift_witness,
    symmetry_from_witness,
    time_reversal_witness,
)
from symmetry.hilbert import RankOneProjection, basis_projection, basis_vector, canonicalize, gap_distance
from symmetry.reconstruct import (
    Frame,
    IsometryWitness,
    Linearity,
    PhaseChain,
    SymmetryMap,
    build_U,
    build_V,
    classify_linearity,
    compose_witness,
    contradiction_moduli,
    contradiction_pair,
    extract_frame,
    extract_phase_chain,
    fix_gauge,
    fixture_residual,
    gap_isometry_defect,
    parseval_check,
    pullback,
    reconstruct,
    validate_symmetry,
    verification_samples,
    verify_witness,
)

SQRT2 = np.sqrt(2.0)


def induced(matrix, tag: Linearity = Linearity.LINEAR, seed: int = 0) -> SymmetryMap:
    return symmetry_from_witness(IsometryWitness(matrix=matrix, tag=tag), scramble_seed=seed)


def global_phase_deviation(W: IsometryWitness, W0: IsometryWitness) -> float:
    """Return max |W - l W0| for the unit scalar l aligning the largest entry of the first column."""
    k = int(np.argmax(np.abs(W0.matrix[:, 0])))
    phase = W.matrix[k, 0] / W0.matrix[k, 0]
    phase /= abs(phase)
    return float(np.max(np.abs(W.matrix - phase * W0.matrix)))


class TestFrame:
    """Test frame extraction and the isometry V."""

    def test_identity_frame(self):
        """Test g_j = e_j for the identity."""
        frame = extract_frame(induced(np.eye(3)))
        np.testing.assert_allclose(frame.matrix, np.eye(3), atol=1e-15)

    def test_shift_frame(self):
        """Test g_j = e_{j+1} for the shift C^3 -> C^4."""
        frame = extract_frame(symmetry_from_witness(shift_witness(3), 0))
        np.testing.assert_allclose(frame.matrix, np.eye(4, 3, k=-1), atol=1e-15)

    def test_adversary_frame_is_orthonormal(self):
        """Test that the adversary keeps an orthonormal frame."""
        frame = extract_frame(partial_conjugation_adversary(4, 3))
        assert frame.gram_defect() <= 1e-12

    def test_collapsing_map_rejected(self):
        """Test that a map sending all basis projections to one point is not a symmetry."""
        target = basis_projection(3, 0)
        f = SymmetryMap(domain_dim=3, codomain_dim=3, query=lambda _: target)
        with pytest.raises(NotASymmetryError):
            extract_frame(f)

    def test_build_V_examples(self):
        """Test V for the identity, the shift and a Hadamard-type frame."""
        assert np.array_equal(build_V(Frame(vectors=[[1, 0], [0, 1]])).matrix, np.eye(2))
        shift = build_V(Frame(vectors=[basis_vector(4, k) for k in (1, 2, 3)]))
        assert np.array_equal(shift.matrix, np.eye(4, 3, k=-1))
        hadamard = build_V(Frame(vectors=[np.array([1, 1]) / SQRT2, np.array([1, -1]) / SQRT2]))
        assert hadamard.isometry_defect() <= 1e-15
        assert hadamard.tag is Linearity.LINEAR

    def test_build_V_rejects_non_orthonormal_frame(self):
        """Test that a frame with overlapping vectors is reported as a non-symmetry."""
        frame = Frame(vectors=[np.array([1, 0]), np.array([1, 1]) / SQRT2])
        with pytest.raises(NotASymmetryError, match="not orthonormal"):
            build_V(frame)

    def test_query_returning_raw_vector(self):
        """Test that a black box cannot hand back a non-unit representative."""
        f = SymmetryMap(domain_dim=2, codomain_dim=2, query=lambda p: RankOneProjection(rep=3 * p.rep))
        with pytest.raises(ValidationError, match="norm"):
            extract_frame(f)


class TestParseval:
    """Test the span-membership residual."""

    def test_frame_member(self):
        """Test that a frame vector has residual zero."""
        frame = Frame(vectors=[basis_vector(3, 1), basis_vector(3, 2)])
        assert parseval_check(basis_vector(3, 1), frame) == 0.0

    def test_orthogonal_complement(self):
        """Test that e1 against (e2, e3) has residual one."""
        frame = Frame(vectors=[basis_vector(3, 1), basis_vector(3, 2)])
        assert parseval_check(basis_vector(3, 0), frame) == 1.0

    def test_combination(self):
        """Test that (g1 + g2)/sqrt2 is in the span."""
        g1, g2 = np.array([1, 1, 0]) / SQRT2, np.array([1, -1, 0]) / SQRT2
        assert parseval_check((g1 + g2) / SQRT2, Frame(vectors=[g1, g2])) <= 1e-15

    def test_image_leaving_the_frame(self):
        """Test that pullback rejects an image outside span(frame)."""

        def query(p):
            # Fixes the basis of C^2 inside C^3 but sends everything else off to e3
            if p.dim == 2 and np.count_nonzero(np.abs(p.rep) > 1e-12) == 1:
                return canonicalize(np.append(p.rep, 0))
            return canonicalize([0, 0, 1])

        f = SymmetryMap(domain_dim=2, codomain_dim=3, query=query)
        g = pullback(f, build_V(extract_frame(f)))
        with pytest.raises(ParsevalError):
            g(canonicalize([1, 1]))


class TestPullbackAndPhases:
    """Test the pulled-back map and the phase chain."""

    def test_identity_pullback(self, rng):
        """Test that the pullback of the identity is the identity."""
        f = induced(np.eye(3), seed=5)
        g = pullback(f, build_V(extract_frame(f)))
        p = canonicalize(rng.standard_normal(3) + 1j * rng.standard_normal(3))
        assert gap_distance(g(p), p) <= 1e-12

    def test_shift_pullback_fixes_basis(self):
        """Test that V* undoes the shift on every basis projection."""
        f = symmetry_from_witness(shift_witness(4), 1)
        g = pullback(f, build_V(extract_frame(f)))
        for k in range(4):
            assert gap_distance(g(basis_projection(4, k)), basis_projection(4, k)) <= 1e-12

    def test_diagonal_pullback(self):
        """Test that diag(1, i) still sends P[(e1 + e2)/sqrt2] to P[(e1 + i e2)/sqrt2]."""
        f = induced(np.diag([1, 1j]))
        g = pullback(f, build_V(extract_frame(f)))
        assert gap_distance(g(canonicalize([1, 1])), canonicalize([1, 1j])) <= 1e-12

    def test_identity_chain(self):
        """Test d = 1 and t = -i for the identity."""
        chain = extract_phase_chain(induced(np.eye(4)))
        np.testing.assert_allclose(chain.delta, [1, 1, 1], atol=1e-12)
        np.testing.assert_allclose(chain.epsilon, [-1j, -1j, -1j], atol=1e-12)

    def test_conjugation_chain(self):
        """Test d = 1 and t = +i for coordinate conjugation."""
        chain = extract_phase_chain(symmetry_from_witness(time_reversal_witness(3), 2))
        np.testing.assert_allclose(chain.delta, [1, 1], atol=1e-12)
        np.testing.assert_allclose(chain.epsilon, [1j, 1j], atol=1e-12)

    @pytest.mark.parametrize("mu", [1j, np.exp(0.7j), -1])
    def test_diagonal_chain(self, mu):
        """Test d_2 = mu and t_2 = -i mu for diag(1, mu)."""
        chain = extract_phase_chain(induced(np.diag([1, mu])))
        assert abs(chain.delta[0] - mu) <= 1e-12
        assert abs(chain.epsilon[0] + 1j * mu) <= 1e-12

    def test_one_dimensional_chain_is_empty(self):
        """Test that C^1 has no neighbour pair."""
        chain = extract_phase_chain(induced(np.eye(1)))
        assert chain.delta == []
        assert chain.relation_residual() == 0.0
        assert chain.classification_evidence() == (0.0, 0.0)


class TestClassify:
    """Test the linear/antilinear decision."""

    @pytest.mark.parametrize(
        "delta, epsilon, expected",
        [
            (1, -1j, Linearity.LINEAR),
            (1, 1j, Linearity.ANTILINEAR),
            (1j, 1, Linearity.LINEAR),
        ],
    )
    def test_examples(self, delta, epsilon, expected):
        """Test t = -i d -> linear, t = +i d -> antilinear."""
        assert classify_linearity(PhaseChain(delta=[delta], epsilon=[epsilon])) is expected

    def test_empty_chain_is_linear(self):
        """Test the one-dimensional case."""
        assert classify_linearity(PhaseChain(delta=[], epsilon=[])) is Linearity.LINEAR

    def test_neither_branch(self):
        """Test that t = d fits no branch."""
        with pytest.raises(PhaseRelationError):
            classify_linearity(PhaseChain(delta=[1], epsilon=[1]))


class TestBuildUAndCompose:
    """Test the diagonal correction and the composed witness."""

    def test_identity(self):
        """Test all d = 1 gives the identity with the requested tag."""
        for tag in Linearity:
            U = build_U(PhaseChain(delta=[1, 1], epsilon=[-1j, -1j]), tag)
            assert np.array_equal(U.matrix, np.eye(3))
            assert U.tag is tag

    def test_cumulative_products(self):
        """Test d = (i, i) gives diag(1, i, -1)."""
        U = build_U(PhaseChain(delta=[1j, 1j], epsilon=[1, 1]), Linearity.LINEAR)
        np.testing.assert_allclose(np.diagonal(U.matrix), [1, 1j, -1], atol=1e-15)

    def test_compose_shift(self):
        """Test V = shift, U = I gives the shift."""
        W = compose_witness(shift_witness(3), IsometryWitness(matrix=np.eye(3)))
        assert np.array_equal(W.matrix, shift_witness(3).matrix)

    def test_compose_antilinear_action(self):
        """Test V = I, U = diag(1, i) antilinear acts as v -> (conj v1, i conj v2)."""
        W = compose_witness(
            IsometryWitness(matrix=np.eye(2)), IsometryWitness(matrix=np.diag([1, 1j]), tag=Linearity.ANTILINEAR)
        )
        v = np.array([1 + 2j, 3 - 1j])
        np.testing.assert_allclose(W.apply(v), [1 - 2j, 1j * (3 + 1j)], atol=1e-15)

    @pytest.mark.parametrize(
        "matrix, message",
        [
            (2 * np.eye(2), "not orthonormal"),
            (np.array([[1, 1], [0, 1]]), "not orthonormal"),
            (np.array([[1, 0]]), "cannot have orthonormal columns"),
        ],
    )
    def test_witness_needs_orthonormal_columns(self, matrix, message):
        """Test that only isometries are accepted as witnesses."""
        with pytest.raises(ValidationError, match=message) as excinfo:
            IsometryWitness(matrix=matrix)
        assert excinfo.value.errors()[0]["loc"] == ("matrix",)

    def test_compose_dimension_mismatch(self):
        """Test that U must be square of V's domain dimension."""
        with pytest.raises(DimensionError):
            compose_witness(shift_witness(3), IsometryWitness(matrix=np.eye(2)))

    def test_fix_gauge(self):
        """Test that the first column's leading entry becomes real positive."""
        W = fix_gauge(IsometryWitness(matrix=1j * np.eye(2)))
        np.testing.assert_allclose(W.matrix, np.eye(2), atol=1e-15)


class TestVerifyWitness:
    """Test the sample-based check of a witness."""

    def test_self_witness(self):
        """Test that a map's own witness has zero residual."""
        W = haar_random_witness(3, Linearity.LINEAR, 11)
        worst, mean = verify_witness(symmetry_from_witness(W, 4), W, verification_samples(3, 50, 0))
        assert worst <= 1e-7
        assert mean <= 1e-7

    def test_wrong_sign(self):
        """Test identity vs diag(1, -1) on (e1 + e2)/sqrt2."""
        worst, _ = verify_witness(
            induced(np.eye(2)), IsometryWitness(matrix=np.diag([1, -1])), [np.array([1, 1]) / SQRT2]
        )
        assert worst == pytest.approx(1.0, abs=1e-12)

    def test_wrong_linearity(self):
        """Test identity vs conjugation on (e1 + i e2)/sqrt2."""
        worst, _ = verify_witness(
            induced(np.eye(2)),
            IsometryWitness(matrix=np.eye(2), tag=Linearity.ANTILINEAR),
            [np.array([1, 1j]) / SQRT2],
        )
        assert worst == pytest.approx(1.0, abs=1e-12)

    def test_shape_mismatch(self):
        """Test that a witness of the wrong shape is rejected."""
        with pytest.raises(DimensionError):
            verify_witness(induced(np.eye(2)), IsometryWitness(matrix=np.eye(3)), [np.array([1, 0])])


class TestReconstruct:
    """Test the full pipeline on induced maps."""

    @pytest.mark.parametrize("n, m", [(1, 1), (2, 2), (3, 4), (8, 8), (8, 13)])
    @pytest.mark.parametrize("tag", list(Linearity))
    def test_round_trip(self, n, m, tag):
        """Test recovery up to a global phase, with the right tag."""
        W0 = random_isometry_witness(n, m, tag, seed=100 * n + m)
        report = reconstruct(symmetry_from_witness(W0, 7), sample_count=100, seed=3)
        assert report.max_gap_residual <= 1e-10
        assert report.witness is not None
        assert global_phase_deviation(report.witness, W0) <= 1e-8
        # On C^1 every map is induced by both a linear and an antilinear scalar
        assert report.witness.tag is (tag if n > 1 else Linearity.LINEAR)
        assert report.phase_relation_residual <= 1e-9
        assert report.parseval_residual <= 1e-10
        assert report.witness.isometry_defect() <= 1e-7

    def test_haar_unitary_dimension_eight(self):
        """Test a seeded Haar unitary in dimension eight."""
        W0 = haar_random_witness(8, Linearity.LINEAR, 42)
        report = reconstruct(symmetry_from_witness(W0, 1), sample_count=200, seed=0)
        assert report.witness.tag is Linearity.LINEAR
        assert report.max_gap_residual <= 1e-10
        assert global_phase_deviation(report.witness, W0) <= 1e-8

    def test_witness_gauge_is_fixed(self):
        """Test that the first column's leading entry of the witness is real positive."""
        report = reconstruct(symmetry_from_witness(haar_random_witness(4, Linearity.ANTILINEAR, 9), 2), 50, 0)
        first = report.witness.matrix[:, 0]
        lead = first[np.flatnonzero(np.abs(first) > 1e-9)[0]]
        assert lead.imag == 0.0
        assert lead.real > 0.0

    @pytest.mark.parametrize("n", [1, 2, 3, 16])
    def test_shift(self, n):
        """Test that the shift reconstructs exactly with M = N + 1."""
        report = reconstruct(symmetry_from_witness(shift_witness(n), n), sample_count=50, seed=n)
        assert report.codomain_dim == n + 1
        assert report.max_gap_residual <= 1e-12
        assert np.max(np.abs(report.witness.matrix - shift_witness(n).matrix)) <= 1e-12

    @pytest.mark.slow
    @pytest.mark.acceptance
    def test_shift_all_dimensions(self):
        """Test the shift for every N up to 64."""
        for n in range(1, 65):
            report = reconstruct(symmetry_from_witness(shift_witness(n), n), sample_count=50, seed=n)
            assert report.max_gap_residual <= 1e-12

    def test_scrambling_does_not_change_residuals(self):
        """Test that output phases do not influence the result."""
        W0 = random_isometry_witness(4, 6, Linearity.ANTILINEAR, 5)
        plain = reconstruct(symmetry_from_witness(W0, 0, scramble=False), 100, 1)
        scrambled = reconstruct(symmetry_from_witness(W0, 0, scramble=True), 100, 1)
        assert abs(plain.max_gap_residual - scrambled.max_gap_residual) <= 1e-7
        assert abs(plain.parseval_residual - scrambled.parseval_residual) <= 1e-7
        assert np.max(np.abs(plain.witness.matrix - scrambled.witness.matrix)) <= 1e-7

    def test_workers_give_identical_report(self):
        """Test that threaded sample evaluation does not change the report."""
        f = symmetry_from_witness(haar_random_witness(5, Linearity.LINEAR, 3), 3)
        single = reconstruct(f, 100, 8, workers=1)
        threaded = reconstruct(f, 100, 8, workers=4)
        assert single.max_gap_residual == threaded.max_gap_residual
        assert single.mean_gap_residual == threaded.mean_gap_residual

    def test_sample_count_must_be_positive(self):
        """Test that at least one random sample is required."""
        with pytest.raises(ValueError, match="sample_count"):
            reconstruct(induced(np.eye(2)), sample_count=0, seed=0)

    @pytest.mark.slow
    @pytest.mark.acceptance
    def test_round_trip_acceptance(self):
        """Test 500 seeded instances across dimensions, codomains and tags."""
        count = 0
        for seed in range(50):
            for n in (2, 3, 8, 32, 128):
                if n == 128 and seed >= 10:
                    continue
                for m in (n, n + 1, n + 5):
                    tag = Linearity.LINEAR if (seed + m) % 2 else Linearity.ANTILINEAR
                    W0 = random_isometry_witness(n, m, tag, seed=seed * 1000 + m)
                    report = reconstruct(symmetry_from_witness(W0, seed), sample_count=1000, seed=seed)
                    assert report.max_gap_residual <= 1e-10
                    assert report.witness.tag is tag
                    assert global_phase_deviation(report.witness, W0) <= 1e-8
                    assert report.phase_relation_residual <= 1e-9
                    assert report.parseval_residual <= 1e-10
                    count += 1
        assert count >= 500


class TestContradiction:
    """Test that a map linear on the first pairs but antilinear further on is rejected."""

    def test_contradiction_pair_constants(self):
        """Test |<x, y>| = sqrt2/4 before and sqrt10/4 after partial conjugation."""
        before, after = contradiction_moduli(partial_conjugation_adversary(4, 3), 3)
        assert before == pytest.approx(np.sqrt(2) / 4, abs=1e-12)
        assert after == pytest.approx(np.sqrt(10) / 4, abs=1e-12)

    def test_contradiction_pair_range(self):
        """Test that j must satisfy 2 <= j <= n - 1."""
        with pytest.raises(DimensionError):
            contradiction_pair(3, 3)
        with pytest.raises(DimensionError):
            contradiction_pair(3, 1)

    def test_adversary_reconstruction_fails_verification(self):
        """Test VerificationError with the fixture residual on the report."""
        with pytest.raises(VerificationError) as excinfo:
            reconstruct(partial_conjugation_adversary(4, 3), sample_count=50, seed=0)
        report = excinfo.value.report
        assert report is not None
        assert report.witness.tag is Linearity.LINEAR
        assert report.fixture_residual == pytest.approx(np.sqrt(10) / 4 - np.sqrt(2) / 4, abs=1e-12)
        assert report.max_gap_residual > 1e-8

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_adversary_rejected_for_every_j(self, n):
        """Test rejection and the contradiction constants for every admissible j."""
        for j in range(2, n):
            f = partial_conjugation_adversary(n, j)
            before, after = contradiction_moduli(f, j)
            assert before == pytest.approx(np.sqrt(2) / 4, abs=1e-12)
            assert after == pytest.approx(np.sqrt(10) / 4, abs=1e-12)
            with pytest.raises(VerificationError):
                reconstruct(f, sample_count=20, seed=j)

    @pytest.mark.slow
    @pytest.mark.acceptance
    @pytest.mark.parametrize("n", range(3, 17))
    def test_adversary_rejected_acceptance(self, n):
        """Test rejection for every N from 3 to 16 and every admissible j."""
        for j in range(2, n):
            with pytest.raises(VerificationError) as excinfo:
                reconstruct(partial_conjugation_adversary(n, j), sample_count=20, seed=j)
            assert excinfo.value.report.fixture_residual == pytest.approx(np.sqrt(10) / 4 - np.sqrt(2) / 4, abs=1e-12)

    def test_induced_maps_have_no_fixture_residual(self):
        """Test that an induced map keeps every contradiction pair's overlap."""
        f = symmetry_from_witness(haar_random_witness(5, Linearity.ANTILINEAR, 1), 1)
        assert fixture_residual(f) <= 1e-12


class TestValidateSymmetry:
    """Test the transition-probability and gap residuals of a black box."""

    def test_induced_map(self):
        """Test residual zero on an induced map."""
        f = symmetry_from_witness(random_isometry_witness(4, 6, Linearity.LINEAR, 2), 2)
        assert validate_symmetry(f, pair_count=200, seed=0) <= 1e-12
        assert gap_isometry_defect(f, pair_count=200, seed=0) <= 1e-7

    def test_adversary(self):
        """Test residual 1/2 = 10/16 - 2/16 on the adversary's contradiction pair."""
        residual = validate_symmetry(partial_conjugation_adversary(4, 3), pair_count=10, seed=0)
        assert residual >= 0.4

    def test_constant_map(self):
        """Test that collapsing orthogonal pairs is detected."""
        target = basis_projection(3, 0)
        f = SymmetryMap(domain_dim=3, codomain_dim=3, query=lambda _: target)
        assert validate_symmetry(f, pair_count=10, seed=0) >= 1 - 1e-7

# Structure Theory Tests

from fractions import Fraction

import numpy as np
import pytest

from liehd.algebra_core import RankOneSpec, center, diagonal_idempotents, rank_one
from liehd.conftest import unit
from liehd.errors import PreconditionError, VerificationError
from liehd.linalg import rank
from liehd.maps import (
    GeneratorSequence,
    LinMap,
    MapFamily,
    convolve,
    identity_map,
    inner_derivation,
    inner_higher,
    is_higher_derivation,
    left_multiplication,
    trace_map,
    transpose_map,
    unit_values_central,
)
from liehd.structure_theory import (
    DeltaSequence,
    Ordering,
    Verdict,
    associated_higher_derivation,
    central_part,
    check_delta_sequence,
    classify_xi_family,
    decompose_family,
    decompose_level_one,
    extract_inner_generator,
    generalized_transfer,
    lie_standard_parts,
    rebuild_from_delta,
    standard_split,
    transfer_to_delta,
)
from liehd.zeroprod_solver import (
    assemble_level_system,
    grow_family,
    make_rng,
    sample_zero_product_pairs,
    solve_level,
)

F = Fraction


def random_gens(algebra, order, seed):
    rng = make_rng(seed)
    return GeneratorSequence(tuple(
        algebra.element(rng.integers(-2, 3, size=algebra.dim).tolist()) for _ in range(order)
    ))


def exponential_family(derivation, order):
    """(id, d, d^2/2, ..., d^N/N!)"""
    levels = [identity_map(derivation.algebra)]
    for n in range(1, order + 1):
        levels.append(levels[-1].compose(derivation) * F(1, n))
    return MapFamily(tuple(levels))


def in_span(vectors, vector, ncols):
    rows = [{i: v for i, v in enumerate(row) if v != 0} for row in vectors]
    return rank(rows + [{i: v for i, v in enumerate(vector) if v != 0}], ncols) == rank(rows, ncols)


def scalar_family(algebra, scalars):
    """U_n = c_n * id"""
    return MapFamily.from_levels(algebra, [identity_map(algebra) * c for c in scalars])


class TestTransfer:
    """Test cases for the transfer recursions"""

    @pytest.mark.parametrize("ordering", [Ordering.A, Ordering.B])
    def test_exponential_family(self, m2, ordering):
        """Test exp(t d) transfers to (d, 0, 0)"""
        derivation = inner_derivation(m2.element([1, 2, 3, 4]))

        sequence = transfer_to_delta(exponential_family(derivation, 3), ordering)

        assert sequence.deltas[0] == derivation
        assert sequence.deltas[1].is_zero()
        assert sequence.deltas[2].is_zero()

    @pytest.mark.parametrize("ordering", ["a", "b"])
    @pytest.mark.parametrize("name", ["m2", "m3"])
    @pytest.mark.parametrize("seed", range(9, 34))
    def test_round_trip(self, request, name, ordering, seed):
        """Test rebuild(transfer(L)) = L for arbitrary order-4 families"""
        algebra = request.getfixturevalue(name)
        rng = make_rng(seed)
        family = MapFamily.from_levels(algebra, [
            LinMap(algebra, rng.integers(-3, 4, size=(algebra.dim, algebra.dim)).tolist()) for _ in range(4)
        ])

        sequence = transfer_to_delta(family, ordering)

        assert sequence.ordering is Ordering(ordering)
        assert rebuild_from_delta(sequence) == family
        assert transfer_to_delta(rebuild_from_delta(sequence), ordering) == sequence

    def test_orderings_differ(self, m2):
        """Test the two orderings disagree on non-commuting levels"""
        family = MapFamily.from_levels(m2, [transpose_map(m2), left_multiplication(unit(m2, "E_12")), identity_map(m2)])

        first = transfer_to_delta(family, Ordering.A)
        second = transfer_to_delta(family, Ordering.B)

        assert first.deltas[:2] == second.deltas[:2]
        assert first.deltas[2] != second.deltas[2]

    def test_needs_order_one(self, m2):
        """Test the identity-only family has no deltas"""
        with pytest.raises(PreconditionError):
            transfer_to_delta(MapFamily.identity(m2, 0))

    def test_inner_family_deltas_are_derivations(self, m2m2):
        """Test deltas of a higher derivation pass the level-1 check"""
        family = inner_higher(m2m2, random_gens(m2m2, 3, seed=1))
        witnesses = sample_zero_product_pairs(m2m2, 20, seed=0)

        for ordering in Ordering:
            assert check_delta_sequence(transfer_to_delta(family, ordering), F(1, 2), witnesses)

    def test_delta_check_reports_level(self, m2):
        """Test the first failing delta is reported by its level"""
        e12 = unit(m2, "E_12")
        sequence = DeltaSequence((inner_derivation(e12), transpose_map(m2)), Ordering.A)

        result = check_delta_sequence(sequence, F(1, 2), [(e12, e12)])

        assert not result
        assert result.name == "delta_sequence"
        assert result.violation.level == 2


class TestStandardParts:
    """Test cases for standard parts and inner generators"""

    def test_lie_standard_parts(self, m2):
        """Test tau(E_11) = c I for ad_T + c * trace"""
        delta = inner_derivation(m2.element([1, 2, 3, 4])) + trace_map(m2) * 5
        idempotent = unit(m2, "E_11")

        shift, tau = lie_standard_parts(delta, idempotent)

        assert tau == m2.identity() * 5
        assert delta(idempotent) == inner_derivation(idempotent)(shift) + tau

    def test_idempotent_grid(self, m3):
        """Test every diagonal idempotent of M_3 gives tau(P) = c tr(P) I"""
        delta = inner_derivation(m3.element([1, 0, 2, -1, 3, 0, 1, 1, 2])) + trace_map(m3) * 2

        for idempotent in diagonal_idempotents(m3):
            _, tau = lie_standard_parts(delta, idempotent)
            trace = sum(m3.block_matrix(idempotent, 0).diagonal(), F(0))
            assert tau == m3.identity() * (2 * trace)

    def test_solved_maps_on_idempotent_grid(self, m3, span_m3):
        """Test every solved xi = 1 basis map has central tau on every diagonal idempotent"""
        space = solve_level(assemble_level_system(MapFamily.identity(m3, 0), 1, span_m3))

        for delta in space.homogeneous:
            for idempotent in diagonal_idempotents(m3):
                shift, tau = lie_standard_parts(delta, idempotent)
                assert delta(idempotent) == inner_derivation(idempotent)(shift) + tau

    def test_not_idempotent(self, m2):
        """Test P must be idempotent"""
        with pytest.raises(PreconditionError):
            lie_standard_parts(identity_map(m2), unit(m2, "E_12"))

    def test_tau_not_central(self, m2):
        """Test a non-Lie map gives a non-central tau"""
        with pytest.raises(VerificationError):
            lie_standard_parts(left_multiplication(unit(m2, "E_11")), unit(m2, "E_11"))

    def test_central_part_of_rank_one(self, m2):
        """Test tau(x (x) f) = c f(x) I for ad_T + c * trace"""
        delta = inner_derivation(m2.element([0, 1, 2, 0])) + trace_map(m2) * 3

        assert central_part(delta, RankOneSpec(0, (1, 0), (0, 1))) == m2.zero()
        assert central_part(delta, RankOneSpec(0, (1, 1), (1, 1))) == m2.identity() * 6

    def test_extract_inner_generator(self, m2):
        """Test R = T - T_11 I is read off the rank-one images"""
        t = np.array([[1, 2], [3, 4]], dtype=object)
        delta = inner_derivation(m2.embed_block(0, t)) + trace_map(m2) * 7

        generator = extract_inner_generator(delta, 0)

        assert np.array_equal(generator, np.array([[0, 2], [3, 3]], dtype=object))

    def test_standard_split(self, m3m2):
        """Test delta = ad_R + c * trace on M_3 + M_2"""
        generator = m3m2.element(make_rng(3).integers(-3, 4, size=m3m2.dim).tolist())
        delta = inner_derivation(generator) + trace_map(m3m2) * F(1, 2)

        split = standard_split(delta)

        assert inner_derivation(split.inner) == inner_derivation(generator)
        assert split.central == trace_map(m3m2) * F(1, 2)

    def test_rank_one_images(self, m2):
        """Test the recovered generator reproduces every rank-one image"""
        generator = m2.element([2, -1, 0, 1])
        delta = inner_derivation(generator)
        recovered = m2.embed_block(0, extract_inner_generator(delta, 0))

        spec = RankOneSpec(0, (1, 2), (3, -1))
        assert inner_derivation(recovered)(rank_one(m2, spec)) == delta(rank_one(m2, spec))


class TestDecomposition:
    """Test cases for the Delta(T) + h decomposition"""

    def test_inner_family(self, m3m2):
        """Test an inner family has h = 0 and reconstructs exactly"""
        family = inner_higher(m3m2, random_gens(m3m2, 2, seed=2))
        witnesses = sample_zero_product_pairs(m3m2, 20, seed=0)

        decomposition = decompose_family(family, witnesses=witnesses)

        assert decomposition.order == 2
        assert decomposition.verified_pairs == 20
        for part in decomposition.blocks:
            assert all(value == 0 for functional in part.functionals for value in functional)
            for matrix in part.generators:
                assert sum(matrix.diagonal(), F(0)) == 0
        assert decomposition.reconstruct() == family

    def test_trace_functional(self, m2):
        """Test ad_T + c * trace gives zero-trace T and h = (c, 0, 0, c)"""
        t = np.array([[1, 2], [3, 4]], dtype=object)
        delta = inner_derivation(m2.embed_block(0, t)) + trace_map(m2) * 5
        witnesses = sample_zero_product_pairs(m2, 20, seed=0)

        decomposition = decompose_level_one(delta, witnesses=witnesses)

        (part,) = decomposition.blocks
        assert part.functionals == ((F(5), F(0), F(0), F(5)),)
        assert np.array_equal(part.generators[0], np.array([[F(-3, 2), 2], [3, F(3, 2)]], dtype=object))
        assert decomposition.reconstruct()[1] == delta

    def test_transpose_fails(self, m2):
        """Test a non-Lie map is reported as a verification failure"""
        with pytest.raises(VerificationError):
            decompose_level_one(transpose_map(m2), witnesses=[])

    def test_needs_xi_one(self, m2):
        """Test the decomposition is refused at xi != 1"""
        with pytest.raises(PreconditionError):
            decompose_family(MapFamily.identity(m2, 1), xi=F(1, 2))

    def test_level_one_basis(self, m3m2):
        """Test every basis derivation ad_b + trace of M_3 + M_2 decomposes"""
        witnesses = sample_zero_product_pairs(m3m2, 10, seed=0)
        trace = trace_map(m3m2)

        for basis in m3m2.basis():
            delta = inner_derivation(basis) + trace
            assert decompose_level_one(delta, witnesses=witnesses).reconstruct()[1] == delta

    @pytest.mark.parametrize("name", ["m2m2", "m3", "m3m2"])
    @pytest.mark.parametrize("seed", [1, 2])
    def test_solved_families(self, request, name, seed):
        """Test random solved xi = 1 families decompose, reconstruct and kill 500 zero-product commutators"""
        algebra = request.getfixturevalue(name)
        span = request.getfixturevalue(f"span_{name}")
        family, _ = grow_family(algebra, 1, 2, span, choice="random", seed=seed)

        decomposition = decompose_family(family, samples=500, seed=seed)

        assert decomposition.verified_pairs == 500
        assert decomposition.reconstruct() == family
        assert unit_values_central(family)

    @pytest.mark.parametrize("name", ["m3", "m3m2"])
    def test_solved_level_one_spaces(self, request, name):
        """Test every basis map of the solved xi = 1 level-1 space decomposes"""
        algebra = request.getfixturevalue(name)
        span = request.getfixturevalue(f"span_{name}")
        space = solve_level(assemble_level_system(MapFamily.identity(algebra, 0), 1, span))
        witnesses = sample_zero_product_pairs(algebra, 500, seed=3)

        for delta in space.homogeneous:
            decomposition = decompose_level_one(delta, witnesses=witnesses)
            assert decomposition.reconstruct()[1] == delta


class TestGeneralized:
    """Test cases for the generalized recursion and xi != 1 classification"""

    def test_associate_of_scalar_twist(self, m2):
        """Test F = U * D with central U has associate D"""
        inner = inner_higher(m2, random_gens(m2, 3, seed=6))
        family = convolve(scalar_family(m2, [2, -1, 3]), inner)

        assert associated_higher_derivation(family) == inner

        gammas, taus = generalized_transfer(family)
        assert gammas.ordering is Ordering.B
        assert taus == transfer_to_delta(inner, Ordering.B)

    def test_generalized_transfer_needs_higher_derivation(self, m2):
        """Test a non-higher-derivation associate is rejected"""
        family = MapFamily.identity(m2, 1)
        associate = MapFamily.from_levels(m2, [transpose_map(m2)])

        with pytest.raises(PreconditionError):
            generalized_transfer(family, associate)

    def test_classify_xi_zero(self, m2):
        """Test U * D classifies as a generalized higher derivation at xi = 0"""
        inner = inner_higher(m2, random_gens(m2, 2, seed=8))
        family = convolve(scalar_family(m2, [1, 4]), inner)

        classification = classify_xi_family(family, 0, samples=30, seed=1)

        assert classification.verdict is Verdict.GENERALIZED_HIGHER_DERIVATION
        assert classification.associate == inner
        assert is_higher_derivation(classification.associate)

    @pytest.mark.parametrize("xi", [F(1, 2), F(-1), F(2)])
    def test_classify_solved_families(self, m2, span_m2, xi):
        """Test solved xi != 0, 1 families are higher derivations"""
        family, _ = grow_family(m2, xi, 2, span_m2, choice="random", seed=4)

        classification = classify_xi_family(family, xi, samples=30, seed=2)

        assert classification.verdict is Verdict.HIGHER_DERIVATION
        assert classification.violation is None

    def test_classify_solved_xi_zero(self, m2, span_m2):
        """Test solved xi = 0 families are generalized higher derivations"""
        family, _ = grow_family(m2, 0, 2, span_m2, choice="random", seed=5)

        classification = classify_xi_family(family, 0, samples=30, seed=2)

        assert classification.verdict is Verdict.GENERALIZED_HIGHER_DERIVATION

    @pytest.mark.parametrize("name", ["m3", "m2m2"])
    @pytest.mark.parametrize("xi", [F(1, 2), F(-1), F(2), F(0)])
    def test_classify_solved_grid(self, request, name, xi):
        """Test solved order-3 families on M_3 and M_2 + M_2 classify, with L_n(I) in the computed center"""
        algebra = request.getfixturevalue(name)
        family, _ = grow_family(algebra, xi, 3, request.getfixturevalue(f"span_{name}"), choice="random", seed=6)

        classification = classify_xi_family(family, xi, samples=100, seed=3)

        if xi == 0:
            assert classification.verdict is Verdict.GENERALIZED_HIGHER_DERIVATION
            assert is_higher_derivation(classification.associate)
        else:
            assert classification.verdict is Verdict.HIGHER_DERIVATION
        central = [element.coords for element in center(algebra)]
        for n in range(1, 4):
            value = family[n](algebra.identity()).coords
            assert in_span(central, value, algebra.dim)

    def test_classify_rejects_xi_one(self, m2):
        """Test xi = 1 is routed to the decomposition instead"""
        with pytest.raises(PreconditionError):
            classify_xi_family(MapFamily.identity(m2, 1), 1)

    def test_classify_rejects_failed_condition(self, m2):
        """Test a family breaking the xi-condition is refused"""
        e12 = unit(m2, "E_12")
        family = MapFamily.from_levels(m2, [transpose_map(m2)])

        with pytest.raises(PreconditionError):
            classify_xi_family(family, F(1, 2), witnesses=[(e12, e12)])

    def test_not_classified(self, m2):
        """Test families checked on no witnesses can come out unclassified"""
        transpose = MapFamily.from_levels(m2, [transpose_map(m2)])
        skewed = MapFamily.from_levels(m2, [left_multiplication(unit(m2, "E_11"))])

        first = classify_xi_family(transpose, F(1, 2), witnesses=[])
        second = classify_xi_family(skewed, 0, witnesses=[])

        assert first.verdict is Verdict.NOT_CLASSIFIED
        assert first.violation.level == 1
        assert second.verdict is Verdict.NOT_CLASSIFIED
        assert second.violation.left == "I"

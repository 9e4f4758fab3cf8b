# Serialization Tests

import json
from fractions import Fraction

import numpy as np
import pytest

from liehd.algebra_core import build_block_diagonal
from liehd.errors import AlgebraError, ArtifactError
from liehd.maps import GeneratorSequence, MapFamily, inner_derivation, inner_higher, trace_map, transpose_map
from liehd.serialization import (
    algebra_from_dict,
    algebra_to_dict,
    classification_from_dict,
    classification_to_dict,
    decode_matrix,
    decode_rational,
    decode_vector,
    decomposition_from_dict,
    decomposition_to_dict,
    delta_from_dict,
    delta_to_dict,
    dumps,
    encode_rational,
    family_from_dict,
    family_to_dict,
    generators_from_dict,
    generators_to_dict,
    read_json,
    solution_from_dict,
    solution_to_dict,
    write_json,
)
from liehd.structure_theory import Ordering, Verdict, classify_xi_family, decompose_level_one, transfer_to_delta
from liehd.zeroprod_solver import assemble_level_system, solve_level

F = Fraction


class TestRationals:
    """Test cases for the rational codec"""

    def test_encode(self):
        """Test integers drop the denominator"""
        assert encode_rational(F(3)) == "3"
        assert encode_rational(F(-2, 4)) == "-1/2"
        assert encode_rational(0) == "0"

    def test_decode(self):
        """Test p/q strings decode exactly"""
        assert decode_rational("-7/3") == F(-7, 3)
        assert decode_rational("12") == F(12)
        assert decode_rational(5) == F(5)

    @pytest.mark.parametrize("text", ["0.5", "1e3", "a/b", "1/-2", "", "1//2"])
    def test_malformed(self, text):
        """Test anything but p or p/q is rejected"""
        with pytest.raises(ArtifactError):
            decode_rational(text)

    def test_zero_denominator(self):
        """Test p/0 is rejected"""
        with pytest.raises(ArtifactError):
            decode_rational("1/0")

    def test_non_strings(self):
        """Test floats and booleans never decode"""
        for value in (0.5, True, None):
            with pytest.raises(ArtifactError):
                decode_rational(value)

    def test_shapes(self):
        """Test vectors and matrices check their shape"""
        with pytest.raises(ArtifactError):
            decode_vector(["1", "2"], 3)
        with pytest.raises(ArtifactError):
            decode_matrix([["1", "0"]], 2)


class TestDocuments:
    """Test cases for artifact documents"""

    def test_algebra_round_trip(self, m3m2):
        """Test an algebra survives JSON with its table and blocks"""
        data = json.loads(dumps(algebra_to_dict(m3m2)))
        algebra = algebra_from_dict(data)

        assert algebra.name == "blocks:3,2"
        assert algebra.blocks == (3, 2)
        assert np.array_equal(algebra.table, m3m2.table)
        assert algebra.unit == m3m2.unit

    def test_algebra_blocks_checked_against_table(self):
        """Test a document claiming M_2 blocks over a diagonal table is rejected"""
        data = algebra_to_dict(build_block_diagonal([1, 1, 1, 1]))
        data["blocks"] = [2]

        with pytest.raises(AlgebraError):
            algebra_from_dict(data)

    def test_algebra_missing_field(self, m2):
        """Test documents missing a field are rejected"""
        data = algebra_to_dict(m2)
        del data["unit"]

        with pytest.raises(ArtifactError):
            algebra_from_dict(data)

    def test_family_round_trip(self, m2):
        """Test families keep exact rationals"""
        family = MapFamily.from_levels(m2, [inner_derivation(m2.element(["1/2", 0, 3, "-2/3"])), trace_map(m2)])

        data = json.loads(dumps(family_to_dict(family)))

        assert data["order"] == 2
        assert len(data["levels"]) == 2
        assert family_from_dict(data, m2) == family

    def test_family_with_level_zero(self, m2):
        """Test an explicit identity at level 0 is accepted"""
        family = MapFamily.from_levels(m2, [transpose_map(m2)])
        data = family_to_dict(family)
        data["levels"] = [[["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]] + data["levels"]

        assert family_from_dict(data, m2) == family

    def test_family_bad_level_zero(self, m2):
        """Test a non-identity level 0 is rejected"""
        data = family_to_dict(MapFamily.from_levels(m2, [transpose_map(m2)]))
        data["levels"] = data["levels"] * 2

        with pytest.raises(ArtifactError):
            family_from_dict(data, m2)

    def test_family_wrong_algebra(self, m2, m3):
        """Test a family written for M_2 does not load into M_3"""
        data = family_to_dict(MapFamily.identity(m2, 1))

        with pytest.raises(ArtifactError):
            family_from_dict(data, m3)

    def test_solution_round_trip(self, m2, span_m2):
        """Test solution spaces keep their basis and provenance numbers"""
        space = solve_level(assemble_level_system(MapFamily.identity(m2, 0), F(1, 2), span_m2))

        data = solution_to_dict(space)
        restored = solution_from_dict(json.loads(dumps(data)), m2)

        assert data["xi"] == "1/2"
        assert data["span_dim"] == 12
        assert restored.homogeneous == space.homogeneous
        assert restored.constraint_count == space.constraint_count

    def test_decomposition_round_trip(self, m2):
        """Test T and h survive JSON"""
        delta = inner_derivation(m2.element([1, 2, 3, 4])) + trace_map(m2) * F(5, 3)
        decomposition = decompose_level_one(delta, witnesses=[])

        data = decomposition_to_dict(decomposition)
        restored = decomposition_from_dict(json.loads(dumps(data)), m2)

        assert data["blocks"][0]["h"] == [["5/3", "0", "0", "5/3"]]
        assert restored.reconstruct() == decomposition.reconstruct()

    def test_delta_round_trip(self, m2):
        """Test delta sequences keep their ordering"""
        family = inner_higher(m2, GeneratorSequence((m2.element([1, 0, 2, 0]), m2.element([0, 1, 0, 0]))))
        sequence = transfer_to_delta(family, Ordering.B)

        data = json.loads(dumps(delta_to_dict(sequence)))

        assert data["ordering"] == "b"
        assert delta_from_dict(data, m2) == sequence

    def test_delta_bad_ordering(self, m2):
        """Test unknown orderings are rejected"""
        data = delta_to_dict(transfer_to_delta(MapFamily.identity(m2, 1)))
        data["ordering"] = "c"

        with pytest.raises(ArtifactError):
            delta_from_dict(data, m2)

    def test_generators_round_trip(self, m2):
        """Test generator sequences survive JSON"""
        gens = GeneratorSequence((m2.element(["1/3", 0, 0, 1]), m2.element([2, 2, 2, 2])))

        assert generators_from_dict(json.loads(dumps(generators_to_dict(gens))), m2) == gens

    def test_classification_round_trip(self, m2):
        """Test verdicts and violations survive JSON"""
        classification = classify_xi_family(MapFamily.from_levels(m2, [transpose_map(m2)]), F(1, 2), witnesses=[])

        data = json.loads(dumps(classification_to_dict(classification)))
        restored = classification_from_dict(data, m2)

        assert data["verdict"] == "NotClassified"
        assert restored.verdict is Verdict.NOT_CLASSIFIED
        assert restored.violation.discrepancy == classification.violation.discrepancy


class TestFiles:
    """Test cases for canonical files"""

    def test_canonical_output(self, tmp_path, m2):
        """Test sorted keys, two-space indent and a trailing newline"""
        path = tmp_path / "nested" / "family.json"

        write_json(path, {"b": 1, "a": ["1/2"]})

        assert path.read_text() == '{\n  "a": [\n    "1/2"\n  ],\n  "b": 1\n}\n'
        assert read_json(path) == {"a": ["1/2"], "b": 1}

    def test_missing_file(self, tmp_path):
        """Test missing files are artifact errors"""
        with pytest.raises(ArtifactError):
            read_json(tmp_path / "absent.json")

    def test_malformed_json(self, tmp_path):
        """Test malformed JSON reports its position"""
        path = tmp_path / "broken.json"
        path.write_text('{"a": ')

        with pytest.raises(ArtifactError) as error:
            read_json(path)

        assert error.value.details["line"] == 1

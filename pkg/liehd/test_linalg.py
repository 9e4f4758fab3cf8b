# Exact Linear Algebra Tests

from fractions import Fraction

import pytest

from liehd.errors import InconsistentSystemError
from liehd.linalg import SpanAccumulator, first_inconsistent_row, nullspace, rank, row_reduce, solve_affine

F = Fraction


class TestRowReduce:
    """Test cases for fraction-free RREF"""

    def test_rational_rows(self):
        """Test RREF of rows with rational entries"""
        rows = [{0: F(1, 2), 1: F(1, 3)}, {0: F(1), 1: F(2, 3)}]

        reduced, pivots = row_reduce(rows, 2)

        assert pivots == (0,)
        assert reduced == [{0: F(1), 1: F(2, 3)}]

    def test_full_rank(self):
        """Test pivots of an invertible system"""
        rows = [{0: F(2), 1: F(1)}, {0: F(1), 1: F(3)}]

        reduced, pivots = row_reduce(rows, 2)

        assert pivots == (0, 1)
        assert reduced == [{0: F(1)}, {1: F(1)}]

    def test_empty(self):
        """Test zero rows reduce to nothing"""
        assert row_reduce([{}, {}], 3) == ([], ())
        assert rank([], 4) == 0


class TestNullspace:
    """Test cases for nullspace bases"""

    def test_single_equation(self):
        """Test x + y + z = 0 has a 2-dimensional nullspace"""
        basis = nullspace([{0: F(1), 1: F(1), 2: F(1)}], 3)

        assert len(basis) == 2
        for vector in basis:
            assert sum(vector) == 0

    def test_no_constraints(self):
        """Test the nullspace of no rows is the whole space"""
        basis = nullspace([], 2)

        assert basis == [[F(1), F(0)], [F(0), F(1)]]


class TestSolveAffine:
    """Test cases for affine solves"""

    def test_particular_and_homogeneous(self):
        """Test x + 2y = 4 with free y"""
        particular, basis = solve_affine([{0: F(1), 1: F(2)}], [F(4)], 2)

        assert particular == [F(4), F(0)]
        assert basis == [[F(-2), F(1)]]

    def test_inconsistent_reports_witness(self):
        """Test the witness is the first row that breaks consistency"""
        rows = [{0: F(1)}, {1: F(1)}, {0: F(1)}]

        with pytest.raises(InconsistentSystemError) as error:
            solve_affine(rows, [F(1), F(0), F(2)], 2)

        assert error.value.details["witness_row"] == 2
        assert error.value.exit_code == 3

    def test_first_inconsistent_row_consistent(self):
        """Test consistent systems have no witness"""
        assert first_inconsistent_row([{0: F(1)}], [F(5)], 1) is None


class TestSpanAccumulator:
    """Test cases for incremental spans"""

    def test_growth_and_membership(self):
        """Test dependent vectors do not enlarge the span"""
        span = SpanAccumulator(3)

        assert span.add({0: F(1), 1: F(1)})
        assert span.add({1: F(1), 2: F(1)})
        assert not span.add({0: F(1), 1: F(2), 2: F(1)})
        assert span.dim == 2
        assert span.contains({0: F(2), 2: F(-2)})
        assert not span.contains({2: F(1)})

    def test_zero_vector(self):
        """Test the zero vector never enlarges the span"""
        span = SpanAccumulator(2)

        assert not span.add({})
        assert span.dim == 0

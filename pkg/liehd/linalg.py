"""
Exact rational linear algebra for liehd.

Rows are sparse ``{column: Fraction}`` dicts. Each row is scaled by the lcm of
its denominators into an integer row, and the integer matrix is brought to
reduced row echelon form with fraction-free Gauss-Jordan elimination
(sympy ``DomainMatrix.rref_den(method="FF")``), so no intermediate fractions
are ever formed.

Features:
- RREF with pivots, nullspace bases and affine solves
- Witness row for inconsistent systems (first inconsistent prefix)
- Incremental span accumulator used by the zero-product span saturation
"""

from fractions import Fraction
from math import lcm
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from .errors import InconsistentSystemError

Row = Dict[int, Fraction]


def _integer_row(row: Mapping[int, Fraction]) -> Dict[int, int]:
    """Scale a rational row to a primitive-denominator integer row"""
    entries = {col: Fraction(value) for col, value in row.items() if value != 0}
    if not entries:
        return {}
    scale = lcm(*(value.denominator for value in entries.values()))
    return {col: ZZ(int(value * scale)) for col, value in entries.items()}


def row_reduce(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> Tuple[List[Row], Tuple[int, ...]]:
    """Reduced row echelon form of `rows`; returns the nonzero rows and pivot columns"""
    dod = {}
    for index, row in enumerate(rows):
        integer_row = _integer_row(row)
        if integer_row:
            dod[index] = integer_row

    if not dod:
        return [], ()

    matrix = DomainMatrix.from_dod(dod, (len(rows), ncols), ZZ)
    reduced, denominator, pivots = matrix.rref_den(method="FF")
    denominator = int(denominator)
    entries = reduced.to_dod()

    result = []
    for index in range(len(pivots)):
        result.append({
            col: Fraction(int(value), denominator)
            for col, value in entries.get(index, {}).items()
        })
    return result, tuple(pivots)


def rank(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> int:
    return len(row_reduce(rows, ncols)[1])


def _basis_from_rref(reduced: List[Row], pivots: Tuple[int, ...], ncols: int) -> List[List[Fraction]]:
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = [Fraction(0)] * ncols
        vector[free] = Fraction(1)
        for row, pivot in zip(reduced, pivots):
            vector[pivot] = -row.get(free, Fraction(0))
        basis.append(vector)
    return basis


def nullspace(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> List[List[Fraction]]:
    """Basis of {x : row . x = 0 for every row}, one vector per free column"""
    reduced, pivots = row_reduce(rows, ncols)
    return _basis_from_rref(reduced, pivots, ncols)


def _augment(rows: Sequence[Mapping[int, Fraction]], rhs: Sequence[Fraction], ncols: int) -> List[Row]:
    augmented = []
    for row, value in zip(rows, rhs):
        extended = dict(row)
        if value != 0:
            extended[ncols] = Fraction(value)
        augmented.append(extended)
    return augmented


def _is_inconsistent(augmented: Sequence[Row], ncols: int) -> bool:
    return ncols in row_reduce(augmented, ncols + 1)[1]


def first_inconsistent_row(rows: Sequence[Mapping[int, Fraction]], rhs: Sequence[Fraction], ncols: int) -> Optional[int]:
    """Index of the row whose addition first makes the system inconsistent"""
    augmented = _augment(rows, rhs, ncols)
    if not _is_inconsistent(augmented, ncols):
        return None

    low, high = 1, len(augmented)
    while low < high:
        middle = (low + high) // 2
        if _is_inconsistent(augmented[:middle], ncols):
            high = middle
        else:
            low = middle + 1
    return low - 1


def solve_affine(rows: Sequence[Mapping[int, Fraction]],
                 rhs: Sequence[Fraction],
                 ncols: int) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """
    Solve rows . x = rhs exactly.

    Returns a particular solution (free variables set to zero) and a basis of
    the homogeneous solutions. Raises InconsistentSystemError naming the first
    row that cannot be satisfied together with its predecessors.
    """
    if len(rows) != len(rhs):
        raise ValueError(f"{len(rows)} rows but {len(rhs)} right-hand sides")

    augmented = _augment(rows, rhs, ncols)
    reduced, pivots = row_reduce(augmented, ncols + 1)

    if ncols in pivots:
        witness = first_inconsistent_row(rows, rhs, ncols)
        raise InconsistentSystemError(
            "Linear system is inconsistent",
            details={"witness_row": witness, "rows": len(rows), "unknowns": ncols},
        )

    particular = [Fraction(0)] * ncols
    for row, pivot in zip(reduced, pivots):
        particular[pivot] = row.get(ncols, Fraction(0))

    homogeneous_rows = [{col: value for col, value in row.items() if col != ncols} for row in reduced]
    return particular, _basis_from_rref(homogeneous_rows, pivots, ncols)


class SpanAccumulator:
    """Incremental reduced echelon basis of a subspace of Q^n"""

    def __init__(self, length: int):
        self.length = length
        self._rows: Dict[int, Row] = {}

    @property
    def dim(self) -> int:
        return len(self._rows)

    def reduce(self, vector: Mapping[int, Fraction]) -> Row:
        """Remainder of `vector` after removing its component in the span"""
        remainder = {col: Fraction(value) for col, value in vector.items() if value != 0}
        # stored rows vanish on every other pivot, so pivot entries never change here
        for pivot in [col for col in remainder if col in self._rows]:
            coefficient = remainder[pivot]
            for col, value in self._rows[pivot].items():
                updated = remainder.get(col, Fraction(0)) - coefficient * value
                if updated == 0:
                    remainder.pop(col, None)
                else:
                    remainder[col] = updated
        return remainder

    def contains(self, vector: Mapping[int, Fraction]) -> bool:
        return not self.reduce(vector)

    def add(self, vector: Mapping[int, Fraction]) -> bool:
        """Add `vector`; returns True when it enlarged the span"""
        remainder = self.reduce(vector)
        if not remainder:
            return False

        pivot = min(remainder)
        scale = remainder[pivot]
        new_row = {col: value / scale for col, value in remainder.items()}

        # keep every stored row zero on every other pivot
        for row in self._rows.values():
            coefficient = row.get(pivot)
            if not coefficient:
                continue
            for col, value in new_row.items():
                updated = row.get(col, Fraction(0)) - coefficient * value
                if updated == 0:
                    row.pop(col, None)
                else:
                    row[col] = updated

        self._rows[pivot] = new_row
        return True


def dense_to_row(vector: Sequence[Fraction]) -> Row:
    return {index: Fraction(value) for index, value in enumerate(vector) if value != 0}

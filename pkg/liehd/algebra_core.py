"""
liehd - Algebra Core

Finite-dimensional unital associative algebras over the rationals, given by
structure constants, together with the rank-one and idempotent machinery used
on block-diagonal models of J-subspace lattice algebras.

Features:
- Full matrix algebras and block-diagonal sums of them (matrix-unit bases)
- Custom algebras from structure constants, validated for associativity/unit
- Exact products, xi-brackets, centers and right annihilators
- Rank-one operators x (x) f inside a block, dual functionals, idempotent and
  rank decompositions
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import AlgebraError, PreconditionError
from .linalg import nullspace, row_reduce
from .log import get_logger

logger = get_logger(__name__)

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]


def to_scalar(value: ScalarLike) -> Fraction:
    """Parse an exact rational (Fraction, int, or "p/q" / "p" string)"""
    if isinstance(value, float):
        raise PreconditionError(f"Refusing inexact scalar {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"Not an exact rational: {value!r}") from exc


def zeros(*shape: int) -> np.ndarray:
    return np.full(shape, Fraction(0), dtype=object)


def as_fraction_array(values: Iterable) -> np.ndarray:
    return np.array([Fraction(value) for value in values], dtype=object)


def identity_matrix(size: int) -> np.ndarray:
    matrix = zeros(size, size)
    for index in range(size):
        matrix[index, index] = Fraction(1)
    return matrix


@dataclass(frozen=True, eq=False)
class Algebra:
    """Unital associative algebra with basis labels and structure constants"""
    name: str
    labels: Tuple[str, ...]
    table: np.ndarray  # table[i, j, :] = coordinates of b_i * b_j
    unit: Tuple[Fraction, ...]
    blocks: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        d = len(self.labels)
        if d == 0:
            raise AlgebraError("Algebra must have positive dimension")
        if self.table.shape != (d, d, d):
            raise AlgebraError(f"Structure constants have shape {self.table.shape}, expected {(d, d, d)}")
        if len(self.unit) != d:
            raise AlgebraError("Unit has the wrong length", details={"dim": d, "unit": len(self.unit)})
        if self.blocks is not None and sum(size * size for size in self.blocks) != d:
            raise AlgebraError("Block sizes do not match the dimension", details={"blocks": list(self.blocks), "dim": d})
        self.table.flags.writeable = False

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def has_blocks(self) -> bool:
        return self.blocks is not None

    # -- elements -----------------------------------------------------------

    def element(self, coords: Iterable[ScalarLike]) -> "Element":
        return Element(self, tuple(to_scalar(c) for c in coords))

    def from_vector(self, vector: Iterable) -> "Element":
        return Element(self, tuple(Fraction(c) for c in vector))

    def zero(self) -> "Element":
        return Element(self, (Fraction(0),) * self.dim)

    def identity(self) -> "Element":
        return Element(self, self.unit)

    def basis_element(self, index: int) -> "Element":
        coords = [Fraction(0)] * self.dim
        coords[index] = Fraction(1)
        return Element(self, tuple(coords))

    def basis(self) -> List["Element"]:
        return [self.basis_element(index) for index in range(self.dim)]

    # -- block metadata -----------------------------------------------------

    def _require_blocks(self):
        if self.blocks is None:
            raise PreconditionError(f"Algebra {self.name} has no block metadata")

    @cached_property
    def block_offsets(self) -> Tuple[int, ...]:
        self._require_blocks()
        offsets, position = [], 0
        for size in self.blocks:
            offsets.append(position)
            position += size * size
        return tuple(offsets)

    def block_size(self, block: int) -> int:
        self._require_blocks()
        if not 0 <= block < len(self.blocks):
            raise PreconditionError(f"Block index {block} out of range", details={"blocks": len(self.blocks)})
        return self.blocks[block]

    def unit_index(self, block: int, row: int, col: int) -> int:
        """Basis index of the matrix unit E_(row, col) inside `block`"""
        size = self.block_size(block)
        return self.block_offsets[block] + row * size + col

    def matrix_unit(self, block: int, row: int, col: int) -> "Element":
        return self.basis_element(self.unit_index(block, row, col))

    def block_matrix(self, element: "Element", block: int) -> np.ndarray:
        """The `block` component of `element` as a size x size matrix"""
        size = self.block_size(block)
        start = self.block_offsets[block]
        values = element.coords[start:start + size * size]
        return np.array(values, dtype=object).reshape(size, size)

    def embed_block(self, block: int, matrix: np.ndarray) -> "Element":
        size = self.block_size(block)
        matrix = np.asarray(matrix, dtype=object)
        if matrix.shape != (size, size):
            raise PreconditionError(f"Block {block} expects a {size}x{size} matrix, got {matrix.shape}")
        coords = [Fraction(0)] * self.dim
        start = self.block_offsets[block]
        for index, value in enumerate(matrix.reshape(-1)):
            coords[start + index] = Fraction(value)
        return Element(self, tuple(coords))

    def block_identity(self, block: int) -> "Element":
        return self.embed_block(block, identity_matrix(self.block_size(block)))

    # -- multiplication -----------------------------------------------------

    def product_vector(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        partial = np.tensordot(left, self.table, axes=([0], [0]))
        return np.tensordot(right, partial, axes=([0], [0]))

    def bracket_tensor(self, xi: Fraction) -> np.ndarray:
        """M[p, q, :] = coordinates of [b_p, b_q]_xi = b_p b_q - xi b_q b_p"""
        return _bracket_tensor(self, Fraction(xi))

    def product_table(self, left_images: np.ndarray, right_images: np.ndarray,
                      tensor: Optional[np.ndarray] = None) -> np.ndarray:
        """
        All pairwise products of columns: out[p, q, :] = col_p(left) * col_q(right).

        Passing a bracket tensor instead of the structure constants gives all
        pairwise xi-brackets.
        """
        tensor = self.table if tensor is None else tensor
        partial = np.tensordot(left_images, tensor, axes=([0], [0]))   # (p, t, s)
        out = np.tensordot(partial, right_images, axes=([1], [0]))     # (p, s, q)
        return out.transpose(0, 2, 1)


@lru_cache(maxsize=64)
def _bracket_tensor(algebra: Algebra, xi: Fraction) -> np.ndarray:
    tensor = algebra.table - xi * algebra.table.transpose(1, 0, 2)
    tensor.flags.writeable = False
    return tensor


@dataclass(frozen=True, eq=False)
class Element:
    """Coordinate vector of an algebra element"""
    algebra: Algebra
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.algebra.dim:
            raise AlgebraError(
                "Element length does not match the algebra",
                details={"algebra": self.algebra.name, "dim": self.algebra.dim, "length": len(self.coords)},
            )

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords, dtype=object)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def _other(self, other: "Element") -> "Element":
        check_same_algebra(self.algebra, other.algebra)
        return other

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return same_algebra(self.algebra, other.algebra) and self.coords == other.coords

    def __hash__(self):
        return hash((self.algebra.name, self.coords))

    def __add__(self, other: "Element") -> "Element":
        other = self._other(other)
        return Element(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Element") -> "Element":
        other = self._other(other)
        return Element(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Element":
        return Element(self.algebra, tuple(-a for a in self.coords))

    def __mul__(self, scalar: ScalarLike) -> "Element":
        if isinstance(scalar, Element):
            return NotImplemented
        factor = to_scalar(scalar)
        return Element(self.algebra, tuple(factor * a for a in self.coords))

    __rmul__ = __mul__

    def __repr__(self):
        terms = [f"{c}*{label}" for c, label in zip(self.coords, self.algebra.labels) if c != 0]
        return f"Element({' + '.join(terms) or '0'})"


@dataclass(frozen=True)
class RankOneSpec:
    """Rank-one operator x (x) f inside one block"""
    block: int
    x: Tuple[Fraction, ...]
    f: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(to_scalar(v) for v in self.x))
        object.__setattr__(self, "f", tuple(to_scalar(v) for v in self.f))
        if len(self.x) != len(self.f):
            raise PreconditionError("x and f must live over the same block space")
        if all(v == 0 for v in self.x) or all(v == 0 for v in self.f):
            raise PreconditionError("Rank-one operators need nonzero x and f", details={"block": self.block})

    def pairing(self) -> Fraction:
        """f(x)"""
        return sum((a * b for a, b in zip(self.f, self.x)), Fraction(0))


def same_algebra(first: Algebra, second: Algebra) -> bool:
    if first is second:
        return True
    return (first.name == second.name
            and first.labels == second.labels
            and first.unit == second.unit
            and np.array_equal(first.table, second.table))


def check_same_algebra(first: Algebra, second: Algebra):
    if not same_algebra(first, second):
        raise AlgebraError(
            "Operands live in different algebras",
            details={"left": first.name, "right": second.name},
        )


# -- constructors -------------------------------------------------------------

def _block_algebra(name: str, sizes: Sequence[int]) -> Algebra:
    single = len(sizes) == 1
    labels, index_of = [], {}
    for block, size in enumerate(sizes):
        for row in range(size):
            for col in range(size):
                index_of[(block, row, col)] = len(labels)
                prefix = "E_" if single else f"E{block + 1}_"
                labels.append(f"{prefix}{row + 1}{col + 1}")

    d = len(labels)
    table = zeros(d, d, d)
    for (block, row, inner), left in index_of.items():
        size = sizes[block]
        for col in range(size):
            right = index_of[(block, inner, col)]
            table[left, right, index_of[(block, row, col)]] = Fraction(1)

    unit = [Fraction(0)] * d
    for block, size in enumerate(sizes):
        for diagonal in range(size):
            unit[index_of[(block, diagonal, diagonal)]] = Fraction(1)

    logger.debug("Built block algebra", name=name, dim=d, blocks=list(sizes))
    return Algebra(name=name, labels=tuple(labels), table=table, unit=tuple(unit), blocks=tuple(sizes))


def build_matrix_algebra(d: int) -> Algebra:
    """The d x d matrix-unit algebra M_d (one block)"""
    if not isinstance(d, int) or d < 1:
        raise PreconditionError(f"Matrix size must be a positive integer, got {d!r}")
    return _block_algebra(f"matrix:{d}", [d])


def build_block_diagonal(sizes: Sequence[int]) -> Algebra:
    """Direct sum of matrix algebras, one block per size"""
    sizes = list(sizes)
    if not sizes:
        raise PreconditionError("Block-diagonal algebra needs at least one block")
    if any(not isinstance(size, int) or size < 1 for size in sizes):
        raise PreconditionError(f"Block sizes must be positive integers, got {sizes}")
    return _block_algebra("blocks:" + ",".join(str(size) for size in sizes), sizes)


def build_custom_algebra(name: str,
                         labels: Sequence[str],
                         products: Dict[Tuple[int, int], Sequence[ScalarLike]],
                         unit: Sequence[ScalarLike],
                         blocks: Optional[Sequence[int]] = None,
                         validate: bool = True) -> Algebra:
    """Algebra from sparse structure constants (missing products are zero)"""
    d = len(labels)
    table = zeros(d, d, d)
    for (i, j), coords in products.items():
        if not (0 <= i < d and 0 <= j < d) or len(coords) != d:
            raise AlgebraError("Malformed structure constant entry", details={"pair": [i, j]})
        table[i, j, :] = [to_scalar(c) for c in coords]

    algebra = Algebra(
        name=name,
        labels=tuple(labels),
        table=table,
        unit=tuple(to_scalar(c) for c in unit),
        blocks=tuple(blocks) if blocks is not None else None,
    )
    if validate:
        validate_algebra(algebra)
    return algebra


def associativity_failure(algebra: Algebra) -> Optional[Tuple[int, int, int]]:
    """First basis triple (i, j, k) with (b_i b_j) b_k != b_i (b_j b_k), if any"""
    table = algebra.table
    left = np.tensordot(table, table, axes=([2], [0]))                        # (i, j, k, t)
    right = np.tensordot(table, table, axes=([1], [2])).transpose(0, 2, 3, 1)  # (i, j, k, t)
    failures = np.argwhere((left != right).any(axis=3))
    if len(failures):
        return tuple(int(v) for v in failures[0])
    return None


def unit_failure(algebra: Algebra) -> Optional[int]:
    unit = algebra.identity().vector
    for index in range(algebra.dim):
        basis = algebra.basis_element(index).vector
        if not (np.array_equal(algebra.product_vector(unit, basis), basis)
                and np.array_equal(algebra.product_vector(basis, unit), basis)):
            return index
    return None


def block_table_failure(algebra: Algebra) -> Optional[Tuple[int, int]]:
    """First basis pair whose product differs from the matrix-unit product of the claimed blocks"""
    if not algebra.has_blocks:
        return None
    expected = _block_algebra(algebra.name, algebra.blocks).table
    failures = np.argwhere((algebra.table != expected).any(axis=2))
    if len(failures):
        return tuple(int(v) for v in failures[0])
    return None


def validate_algebra(algebra: Algebra):
    """Raise AlgebraError unless the algebra is associative with a two-sided unit

    Block metadata must describe the table: the basis is the matrix units of
    the claimed blocks, in block-major, row-major order.
    """
    triple = associativity_failure(algebra)
    if triple is not None:
        raise AlgebraError("Multiplication is not associative",
                           details={"triple": [algebra.labels[i] for i in triple]})
    index = unit_failure(algebra)
    if index is not None:
        raise AlgebraError("Unit does not act as identity", details={"basis": algebra.labels[index]})
    pair = block_table_failure(algebra)
    if pair is not None:
        raise AlgebraError("Structure constants do not match the claimed blocks",
                           details={"blocks": list(algebra.blocks), "pair": [algebra.labels[i] for i in pair]})


# -- arithmetic -----------------------------------------------------------------

def multiply(a: Element, b: Element) -> Element:
    check_same_algebra(a.algebra, b.algebra)
    return a.algebra.from_vector(a.algebra.product_vector(a.vector, b.vector))


def xi_bracket(a: Element, b: Element, xi: ScalarLike) -> Element:
    """[a, b]_xi = ab - xi ba; xi = 1 is the commutator"""
    return multiply(a, b) - multiply(b, a) * to_scalar(xi)


def commutator(a: Element, b: Element) -> Element:
    return xi_bracket(a, b, 1)


def power(a: Element, exponent: int) -> Element:
    result = a.algebra.identity()
    for _ in range(exponent):
        result = multiply(result, a)
    return result


def is_central(element: Element) -> bool:
    algebra = element.algebra
    return all(commutator(element, basis).is_zero() for basis in algebra.basis())


def center(algebra: Algebra) -> List[Element]:
    """Basis of the center {Z : Z b = b Z for every basis element b}"""
    tensor = algebra.bracket_tensor(Fraction(1))
    rows = []
    for k in range(algebra.dim):
        for s in range(algebra.dim):
            row = {i: tensor[i, k, s] for i in range(algebra.dim) if tensor[i, k, s] != 0}
            if row:
                rows.append(row)
    return [algebra.element(vector) for vector in nullspace(rows, algebra.dim)]


def right_annihilator(algebra: Algebra, a: Element) -> List[Element]:
    """Basis of {B : aB = 0}"""
    check_same_algebra(algebra, a.algebra)
    left_action = np.tensordot(a.vector, algebra.table, axes=([0], [0]))  # (j, s)
    rows = []
    for s in range(algebra.dim):
        row = {j: left_action[j, s] for j in range(algebra.dim) if left_action[j, s] != 0}
        if row:
            rows.append(row)
    return [algebra.element(vector) for vector in nullspace(rows, algebra.dim)]


def left_annihilator(algebra: Algebra, b: Element) -> List[Element]:
    """Basis of {A : Ab = 0}"""
    check_same_algebra(algebra, b.algebra)
    right_action = np.tensordot(algebra.table, b.vector, axes=([1], [0]))  # (i, s)
    rows = []
    for s in range(algebra.dim):
        row = {i: right_action[i, s] for i in range(algebra.dim) if right_action[i, s] != 0}
        if row:
            rows.append(row)
    return [algebra.element(vector) for vector in nullspace(rows, algebra.dim)]


# -- rank-one machinery -------------------------------------------------------------

def rank_one(algebra: Algebra, spec: RankOneSpec) -> Element:
    """x (x) f : y -> f(y) x, embedded in its block"""
    size = algebra.block_size(spec.block)
    if len(spec.x) != size:
        raise PreconditionError(f"Rank-one vectors must have length {size}", details={"block": spec.block})
    outer = np.outer(as_fraction_array(spec.x), as_fraction_array(spec.f))
    return algebra.embed_block(spec.block, outer)


def dual_pick(algebra: Algebra, block: int, x: Sequence[ScalarLike]) -> Tuple[Fraction, ...]:
    """A covector f with f(x) = 1, supported on the first nonzero coordinate of x"""
    size = algebra.block_size(block)
    vector = [to_scalar(v) for v in x]
    if len(vector) != size:
        raise PreconditionError(f"Vector must have length {size}", details={"block": block})
    for index, value in enumerate(vector):
        if value != 0:
            covector = [Fraction(0)] * size
            covector[index] = 1 / value
            return tuple(covector)
    raise PreconditionError("dual_pick needs a nonzero vector", details={"block": block})


def idempotent_decompose(algebra: Algebra, spec: RankOneSpec) -> List[Tuple[Fraction, Element]]:
    """
    Write x (x) f as a linear combination of idempotents.

    If f(x) = l != 0 the single idempotent l^-1 x (x) f suffices. Otherwise
    pick y with f(y) = 1 and use x (x) f = (x + y) (x) f - y (x) f.
    """
    pairing = spec.pairing()
    if pairing != 0:
        scaled = RankOneSpec(spec.block, tuple(v / pairing for v in spec.x), spec.f)
        return [(pairing, rank_one(algebra, scaled))]

    y = dual_pick(algebra, spec.block, spec.f)
    shifted = RankOneSpec(spec.block, tuple(a + b for a, b in zip(spec.x, y)), spec.f)
    return [
        (Fraction(1), rank_one(algebra, shifted)),
        (Fraction(-1), rank_one(algebra, RankOneSpec(spec.block, y, spec.f))),
    ]


def rank_decompose(algebra: Algebra, element: Element) -> List[RankOneSpec]:
    """Per-block rank factorization: column-pivot RREF gives M = M[:, pivots] . R"""
    if not algebra.has_blocks:
        raise PreconditionError(f"rank_decompose needs block metadata; {algebra.name} has none")
    check_same_algebra(algebra, element.algebra)

    specs = []
    for block, size in enumerate(algebra.blocks):
        matrix = algebra.block_matrix(element, block)
        rows = [{col: matrix[row, col] for col in range(size) if matrix[row, col] != 0} for row in range(size)]
        reduced, pivots = row_reduce(rows, size)
        for reduced_row, pivot in zip(reduced, pivots):
            x = tuple(matrix[:, pivot])
            f = tuple(reduced_row.get(col, Fraction(0)) for col in range(size))
            specs.append(RankOneSpec(block, x, f))
    return specs


def diagonal_idempotents(algebra: Algebra) -> List[Element]:
    """Every sum of a nonempty proper subset of diagonal matrix units"""
    algebra._require_blocks()
    diagonal = [
        algebra.unit_index(block, index, index)
        for block, size in enumerate(algebra.blocks)
        for index in range(size)
    ]
    idempotents = []
    for count in range(1, len(diagonal)):
        for subset in combinations(diagonal, count):
            coords = [Fraction(0)] * algebra.dim
            for index in subset:
                coords[index] = Fraction(1)
            idempotents.append(algebra.element(coords))
    return idempotents


def block_trace(algebra: Algebra, element: Element, block: int) -> Fraction:
    return sum(algebra.block_matrix(element, block).diagonal(), Fraction(0))


def central_scalar(algebra: Algebra, element: Element, block: int) -> Optional[Fraction]:
    """c when the `block` component of element is c * I, else None"""
    matrix = algebra.block_matrix(element, block)
    scalar = matrix[0, 0]
    if np.array_equal(matrix, scalar * identity_matrix(matrix.shape[0])):
        return Fraction(scalar)
    return None


def random_element(algebra: Algebra, rng: np.random.Generator, bound: int) -> Element:
    values = rng.integers(-bound, bound + 1, size=algebra.dim)
    return algebra.element(int(v) for v in values)

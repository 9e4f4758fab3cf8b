"""
liehd - Maps

Linear self-maps of an algebra, finite families (L_0 = id, L_1, ..., L_N),
the convolution group on such families and inner higher derivations built
from generator sequences. The definitional checks (higher, Lie higher,
generalized higher derivation, xi-condition on zero products) evaluate the
identities on every basis pair, which decides them exactly by bilinearity.

Features:
- LinMap arithmetic and composition over exact rationals
- Convolution (d * e)_n = sum_{i+j=n} d_i o e_j and its inverse
- [a, k]_n bracket-power maps and inner higher derivations
- First-violation reporting in lexicographic (level, pair) order
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .algebra_core import (
    Algebra,
    Element,
    ScalarLike,
    check_same_algebra,
    commutator,
    identity_matrix,
    multiply,
    power,
    same_algebra,
    to_scalar,
    xi_bracket,
    zeros,
)
from .errors import AlgebraError, PreconditionError
from .log import get_logger

logger = get_logger(__name__)


def _fraction_matrix(matrix: Any, size: int) -> np.ndarray:
    array = np.asarray(matrix, dtype=object)
    if array.shape != (size, size):
        raise AlgebraError(f"Linear map needs a {size}x{size} matrix, got {array.shape}")
    converted = np.empty((size, size), dtype=object)
    for index, value in np.ndenumerate(array):
        converted[index] = Fraction(value)
    converted.flags.writeable = False
    return converted


@dataclass(frozen=True, eq=False)
class LinMap:
    """Linear self-map; column k of `matrix` holds the image of basis element k"""
    algebra: Algebra
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _fraction_matrix(self.matrix, self.algebra.dim))

    def __call__(self, element: Element) -> Element:
        return apply(self, element)

    def _other(self, other: "LinMap") -> "LinMap":
        check_same_algebra(self.algebra, other.algebra)
        return other

    def compose(self, other: "LinMap") -> "LinMap":
        """self o other"""
        other = self._other(other)
        return LinMap(self.algebra, self.matrix @ other.matrix)

    __matmul__ = compose

    def __add__(self, other: "LinMap") -> "LinMap":
        return LinMap(self.algebra, self.matrix + self._other(other).matrix)

    def __sub__(self, other: "LinMap") -> "LinMap":
        return LinMap(self.algebra, self.matrix - self._other(other).matrix)

    def __neg__(self) -> "LinMap":
        return LinMap(self.algebra, -self.matrix)

    def __mul__(self, scalar: ScalarLike) -> "LinMap":
        if isinstance(scalar, LinMap):
            return NotImplemented
        return LinMap(self.algebra, self.matrix * to_scalar(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return same_algebra(self.algebra, other.algebra) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.algebra.name, tuple(self.matrix.reshape(-1))))

    def is_zero(self) -> bool:
        return not (self.matrix != 0).any()

    def image(self, index: int) -> Element:
        return self.algebra.from_vector(self.matrix[:, index])


@dataclass(frozen=True)
class MapFamily:
    """Family (L_0, L_1, ..., L_N) with L_0 the identity"""
    maps: Tuple[LinMap, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if not maps:
            raise PreconditionError("A map family needs at least its level-0 map")
        algebra = maps[0].algebra
        for linear_map in maps:
            check_same_algebra(algebra, linear_map.algebra)
        if maps[0] != identity_map(algebra):
            raise PreconditionError("Malformed family: level 0 must be the identity map")

    @classmethod
    def from_levels(cls, algebra: Algebra, levels: Iterable[LinMap]) -> "MapFamily":
        """Family from levels 1..N; level 0 is the identity"""
        return cls((identity_map(algebra),) + tuple(levels))

    @classmethod
    def identity(cls, algebra: Algebra, order: int) -> "MapFamily":
        return cls((identity_map(algebra),) + tuple(zero_map(algebra) for _ in range(order)))

    @property
    def algebra(self) -> Algebra:
        return self.maps[0].algebra

    @property
    def order(self) -> int:
        return len(self.maps) - 1

    def __getitem__(self, level: int) -> LinMap:
        return self.maps[level]

    def __len__(self) -> int:
        return len(self.maps)

    def truncate(self, order: int) -> "MapFamily":
        return MapFamily(self.maps[:order + 1])

    def extend(self, linear_map: LinMap) -> "MapFamily":
        return MapFamily(self.maps + (linear_map,))

    def __eq__(self, other):
        if not isinstance(other, MapFamily):
            return NotImplemented
        return len(self.maps) == len(other.maps) and all(a == b for a, b in zip(self.maps, other.maps))

    __hash__ = None


@dataclass(frozen=True)
class GeneratorSequence:
    """Generator sequence (a_1, ..., a_N) of an inner higher derivation"""
    gens: Tuple[Element, ...]

    def __post_init__(self):
        gens = tuple(self.gens)
        object.__setattr__(self, "gens", gens)
        if not gens:
            raise PreconditionError("Generator sequence needs length N >= 1")
        for element in gens[1:]:
            check_same_algebra(gens[0].algebra, element.algebra)

    @classmethod
    def from_blocks(cls, algebra: Algebra, per_block: Sequence[Sequence[Any]]) -> "GeneratorSequence":
        """
        One matrix sequence per block, embedded and summed.

        Blocks are mutually orthogonal, so the inner higher derivation of the
        summed sequence acts inside each block by that block's own sequence.
        """
        if len(per_block) != len(algebra.blocks or ()):
            raise PreconditionError("Need exactly one generator sequence per block")
        lengths = {len(sequence) for sequence in per_block}
        if len(lengths) != 1:
            raise PreconditionError("Per-block generator sequences must share one length")
        (order,) = lengths
        gens = []
        for level in range(order):
            total = algebra.zero()
            for block, sequence in enumerate(per_block):
                total = total + algebra.embed_block(block, sequence[level])
            gens.append(total)
        return cls(tuple(gens))

    @property
    def order(self) -> int:
        return len(self.gens)


@dataclass
class Violation:
    """First failing instance of a checked identity"""
    level: int
    left: str
    right: str
    discrepancy: Element
    witness: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        from .serialization import encode_vector
        return {
            "level": self.level,
            "left": self.left,
            "right": self.right,
            "witness": self.witness,
            "discrepancy": encode_vector(self.discrepancy.coords),
        }


@dataclass
class CheckResult:
    """Outcome of a definitional check"""
    name: str
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.name,
            "ok": self.ok,
            "violation": self.violation.to_dict() if self.violation else None,
        }


# -- constructors -----------------------------------------------------------------

def identity_map(algebra: Algebra) -> LinMap:
    return LinMap(algebra, identity_matrix(algebra.dim))


def zero_map(algebra: Algebra) -> LinMap:
    return LinMap(algebra, zeros(algebra.dim, algebra.dim))


def from_images(algebra: Algebra, images: Sequence[Element]) -> LinMap:
    """Map sending basis element k to images[k]"""
    if len(images) != algebra.dim:
        raise AlgebraError(f"Need {algebra.dim} images, got {len(images)}")
    matrix = zeros(algebra.dim, algebra.dim)
    for index, image in enumerate(images):
        check_same_algebra(algebra, image.algebra)
        matrix[:, index] = image.coords
    return LinMap(algebra, matrix)


def from_function(algebra: Algebra, function: Callable[[Element], Element]) -> LinMap:
    return from_images(algebra, [function(basis) for basis in algebra.basis()])


def left_multiplication(element: Element) -> LinMap:
    """x -> c x"""
    algebra = element.algebra
    return LinMap(algebra, np.tensordot(element.vector, algebra.table, axes=([0], [0])).T)


def right_multiplication(element: Element) -> LinMap:
    """x -> x c"""
    algebra = element.algebra
    return LinMap(algebra, np.tensordot(algebra.table, element.vector, axes=([1], [0])).T)


def inner_derivation(element: Element) -> LinMap:
    """ad_T : x -> T x - x T"""
    return left_multiplication(element) - right_multiplication(element)


def trace_map(algebra: Algebra) -> LinMap:
    """A -> tr(A) I, with tr the sum of the block traces"""
    if not algebra.has_blocks:
        raise PreconditionError(f"trace_map needs block metadata; {algebra.name} has none")
    unit = algebra.identity()
    images = []
    for index in range(algebra.dim):
        basis = algebra.basis_element(index)
        trace = sum(
            (algebra.block_matrix(basis, block).diagonal().sum() for block in range(len(algebra.blocks))),
            Fraction(0),
        )
        images.append(unit * trace)
    return from_images(algebra, images)


def transpose_map(algebra: Algebra) -> LinMap:
    """Blockwise matrix transpose E_ij -> E_ji"""
    if not algebra.has_blocks:
        raise PreconditionError(f"transpose_map needs block metadata; {algebra.name} has none")
    images = [None] * algebra.dim
    for block, size in enumerate(algebra.blocks):
        for row in range(size):
            for col in range(size):
                images[algebra.unit_index(block, row, col)] = algebra.matrix_unit(block, col, row)
    return from_images(algebra, images)


# -- operations -----------------------------------------------------------------

def apply(linear_map: LinMap, element: Element) -> Element:
    check_same_algebra(linear_map.algebra, element.algebra)
    return linear_map.algebra.from_vector(linear_map.matrix @ element.vector)


def _check_compatible(first: MapFamily, second: MapFamily):
    check_same_algebra(first.algebra, second.algebra)
    if first.order != second.order:
        raise PreconditionError(
            "Families have different orders",
            details={"left": first.order, "right": second.order},
        )


def convolve(first: MapFamily, second: MapFamily) -> MapFamily:
    """(d * e)_n = sum_{i+j=n} d_i o e_j"""
    _check_compatible(first, second)
    levels = []
    for n in range(first.order + 1):
        total = first[0].matrix @ second[n].matrix
        for i in range(1, n + 1):
            total = total + first[i].matrix @ second[n - i].matrix
        levels.append(LinMap(first.algebra, total))
    return MapFamily(tuple(levels))


def convolve_inverse(family: MapFamily) -> MapFamily:
    """Two-sided inverse: e_0 = id, e_n = -sum_{j<n} d_{n-j} o e_j"""
    algebra = family.algebra
    inverse = [identity_map(algebra)]
    for n in range(1, family.order + 1):
        total = zeros(algebra.dim, algebra.dim)
        for j in range(n):
            total = total + family[n - j].matrix @ inverse[j].matrix
        inverse.append(LinMap(algebra, -total))
    return MapFamily(tuple(inverse))


def bracket_power_map(a: Element, k: int, n: int) -> LinMap:
    """
    The level-n component of [a, k]:
    identity for n = 0, zero when k does not divide n, and
    x -> a^r x - a^(r-1) x a for n = k r.
    """
    if k < 1:
        raise PreconditionError(f"bracket_power_map needs k >= 1, got {k}")
    if n < 0:
        raise PreconditionError(f"Level must be nonnegative, got {n}")
    algebra = a.algebra
    if n == 0:
        return identity_map(algebra)
    if n % k:
        return zero_map(algebra)
    r = n // k
    return left_multiplication(power(a, r)) - left_multiplication(power(a, r - 1)).compose(right_multiplication(a))


def inner_higher(algebra: Algebra, gens: GeneratorSequence) -> MapFamily:
    """Delta(a)_n = ([a_1, 1] * [a_2, 2] * ... * [a_N, N])_n"""
    order = gens.order
    result = None
    for k, generator in enumerate(gens.gens, start=1):
        check_same_algebra(algebra, generator.algebra)
        factor = MapFamily(tuple(bracket_power_map(generator, k, n) for n in range(order + 1)))
        result = factor if result is None else convolve(result, factor)
    return result


# -- definitional checks ----------------------------------------------------------

def _first_mismatch(algebra: Algebra, level: int, lhs: np.ndarray, rhs: np.ndarray) -> Optional[Violation]:
    difference = lhs - rhs
    failing = np.argwhere((difference != 0).any(axis=2))
    if not len(failing):
        return None
    p, q = (int(v) for v in failing[0])
    return Violation(level, algebra.labels[p], algebra.labels[q], algebra.from_vector(difference[p, q]))


def _pair_check(name: str,
                family: MapFamily,
                tensor: np.ndarray,
                right_family: Optional[MapFamily] = None) -> CheckResult:
    algebra = family.algebra
    right_family = right_family or family
    images = [linear_map.matrix for linear_map in family.maps]
    right_images = [linear_map.matrix for linear_map in right_family.maps]

    for n in range(1, family.order + 1):
        lhs = np.tensordot(tensor, images[n], axes=([2], [1]))
        rhs = zeros(algebra.dim, algebra.dim, algebra.dim)
        for i in range(n + 1):
            rhs = rhs + algebra.product_table(images[i], right_images[n - i], tensor)
        violation = _first_mismatch(algebra, n, lhs, rhs)
        if violation is not None:
            logger.debug("Check failed", check=name, level=n, left=violation.left, right=violation.right)
            return CheckResult(name, False, violation)
    return CheckResult(name, True)


def is_higher_derivation(family: MapFamily) -> CheckResult:
    """L_n(xy) = sum_{i+j=n} L_i(x) L_j(y) on every basis pair"""
    return _pair_check("higher_derivation", family, family.algebra.table)


def is_lie_higher_derivation(family: MapFamily) -> CheckResult:
    """L_n([x,y]) = sum_{i+j=n} [L_i(x), L_j(y)] on every basis pair"""
    return _pair_check("lie_higher_derivation", family, family.algebra.bracket_tensor(Fraction(1)))


def is_generalized_higher_derivation(family: MapFamily, associate: MapFamily) -> CheckResult:
    """L_n(xy) = sum_{i+j=n} L_i(x) d_j(y) for the higher derivation d = associate"""
    _check_compatible(family, associate)
    if not is_higher_derivation(associate):
        raise PreconditionError("The associated family is not a higher derivation")
    return _pair_check("generalized_higher_derivation", family, family.algebra.table, associate)


def is_derivation(linear_map: LinMap) -> CheckResult:
    return is_higher_derivation(MapFamily.from_levels(linear_map.algebra, [linear_map]))


def is_lie_derivation(linear_map: LinMap) -> CheckResult:
    return is_lie_higher_derivation(MapFamily.from_levels(linear_map.algebra, [linear_map]))


def is_generalized_derivation(linear_map: LinMap, derivation: LinMap) -> CheckResult:
    algebra = linear_map.algebra
    return is_generalized_higher_derivation(
        MapFamily.from_levels(algebra, [linear_map]),
        MapFamily.from_levels(algebra, [derivation]),
    )


def lie_zero_product_identity_unrestricted(linear_map: LinMap) -> CheckResult:
    """
    delta([A, F]) = [delta(A), F] + [A, delta(F)] for every A and every
    finite-rank F. In finite dimensions every element has finite rank, so
    this is the full Lie derivation identity.
    """
    result = is_lie_derivation(linear_map)
    return CheckResult("extended_lie_identity", result.ok, result.violation)


def xi_condition_on_zero_products(family: MapFamily,
                                  xi: ScalarLike,
                                  witnesses: Sequence[Tuple[Element, Element]]) -> CheckResult:
    """L_n([A,B]_xi) = sum_{i+j=n} [L_i(A), L_j(B)]_xi for every witness pair (AB = 0)"""
    xi = to_scalar(xi)
    algebra = family.algebra
    for index, (left, right) in enumerate(witnesses):
        check_same_algebra(algebra, left.algebra)
        if not multiply(left, right).is_zero():
            raise PreconditionError("Witness pair does not multiply to zero", details={"witness": index})

    images = [[(linear_map(left), linear_map(right)) for linear_map in family.maps] for left, right in witnesses]
    for n in range(1, family.order + 1):
        for index, (left, right) in enumerate(witnesses):
            lhs = family[n](xi_bracket(left, right, xi))
            rhs = algebra.zero()
            for i in range(n + 1):
                rhs = rhs + xi_bracket(images[index][i][0], images[index][n - i][1], xi)
            if lhs != rhs:
                violation = Violation(n, repr(left), repr(right), lhs - rhs, witness=index)
                return CheckResult("xi_zero_product", False, violation)
    return CheckResult("xi_zero_product", True)


def unit_values_central(family: MapFamily) -> CheckResult:
    """L_n(I) lies in the center for every level n >= 1"""
    algebra = family.algebra
    unit = algebra.identity()
    for n in range(1, family.order + 1):
        value = family[n](unit)
        for basis_index, basis in enumerate(algebra.basis()):
            defect = commutator(value, basis)
            if not defect.is_zero():
                return CheckResult("unit_central", False, Violation(n, "I", algebra.labels[basis_index], defect))
    return CheckResult("unit_central", True)

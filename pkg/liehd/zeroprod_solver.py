"""
liehd - Zero-Product Solver

Solves for the level-n maps L_n that satisfy

    L_n([A, B]_xi) = sum_{i+j=n} [L_i(A), L_j(B)]_xi   whenever AB = 0

given the lower levels. The defect is bilinear in (A, B), so it vanishes on
the zero-product variety iff it vanishes on the variety's linear span inside
the tensor square. That span is built from certified zero-product pairs:

1. basis pairs (b_p, b_q) with b_p b_q = 0
2. idempotent pairs P (x) (I - P), (A - AP) (x) P, AP (x) (I - P)
3. seeded saturation A (x) right_annihilator(A) until the dimension is
   stable for a window of consecutive draws

Every stored span vector is an explicit A (x) B with AB = 0.
"""

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .algebra_core import (
    Algebra,
    Element,
    ScalarLike,
    diagonal_idempotents,
    multiply,
    random_element,
    right_annihilator,
    same_algebra,
    to_scalar,
    xi_bracket,
    zeros,
)
from .config import DEFAULT_SEED, MAX_UNKNOWNS, RANDOM_ENTRY_BOUND, SATURATION_WINDOW, TIGHTNESS_DRAWS
from .errors import InconsistentSystemError, PreconditionError, VerificationError
from .linalg import Row, SpanAccumulator, dense_to_row, solve_affine
from .log import get_logger
from .maps import LinMap, MapFamily, identity_map

logger = get_logger(__name__)

Pair = Tuple[Element, Element]
Choice = Union[str, Sequence[ScalarLike], LinMap]


def make_rng(seed: int) -> np.random.Generator:
    """Named, seedable 64-bit generator shared by every randomized operation"""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class TensorSpanBasis:
    """Linearly independent zero-product tensors A (x) B with provenance"""
    algebra: Algebra
    pairs: Tuple[Pair, ...]
    provenance: Tuple[str, ...]
    draws: int
    seed: int

    @property
    def dim(self) -> int:
        return len(self.pairs)

    @property
    def vectors(self) -> List[np.ndarray]:
        """Each span vector as a d x d coefficient array c[p, q]"""
        return [np.outer(left.vector, right.vector) for left, right in self.pairs]

    def accumulator(self) -> SpanAccumulator:
        accumulator = SpanAccumulator(self.algebra.dim ** 2)
        for vector in self.vectors:
            accumulator.add(dense_to_row(vector.reshape(-1)))
        return accumulator


class _SpanBuilder:
    """Collects zero-product pairs that enlarge the span"""

    def __init__(self, algebra: Algebra, accumulator: Optional[SpanAccumulator] = None):
        self.algebra = algebra
        self.accumulator = accumulator or SpanAccumulator(algebra.dim ** 2)
        self.pairs: List[Pair] = []
        self.provenance: List[str] = []

    def offer(self, left: Element, right: Element, source: str) -> bool:
        tensor = np.outer(left.vector, right.vector).reshape(-1)
        if not self.accumulator.add(dense_to_row(tensor)):
            return False
        self.pairs.append((left, right))
        self.provenance.append(source)
        return True


def _zero_divisor_seeds(algebra: Algebra) -> List[Element]:
    """Basis elements with a nontrivial right annihilator"""
    return [basis for basis in algebra.basis() if right_annihilator(algebra, basis)]


def _draw_zero_divisor(algebra: Algebra, seeds: Sequence[Element], rng: np.random.Generator) -> Element:
    """R1 . E . R2 for a random seed zero divisor E; stays a left zero divisor"""
    seed = seeds[int(rng.integers(len(seeds)))]
    left = random_element(algebra, rng, RANDOM_ENTRY_BOUND)
    right = random_element(algebra, rng, RANDOM_ENTRY_BOUND)
    return multiply(multiply(left, seed), right)


def _saturate(builder: _SpanBuilder,
              rng: np.random.Generator,
              window: Optional[int] = None,
              draws: Optional[int] = None) -> int:
    """Saturation draws until `window` consecutive draws add nothing, or exactly `draws` draws"""
    algebra = builder.algebra
    seeds = _zero_divisor_seeds(algebra)
    if not seeds:
        return 0

    count, stable = 0, 0
    while (draws is not None and count < draws) or (draws is None and stable < window):
        zero_divisor = _draw_zero_divisor(algebra, seeds, rng)
        grew = False
        for partner in right_annihilator(algebra, zero_divisor):
            grew |= builder.offer(zero_divisor, partner, f"saturation:{count}")
        stable = 0 if grew else stable + 1
        count += 1
    return count


def zero_product_span(algebra: Algebra,
                      seed: int = DEFAULT_SEED,
                      window: int = SATURATION_WINDOW) -> TensorSpanBasis:
    """Basis of a subspace of span{A (x) B : AB = 0}"""
    started = time.time()
    builder = _SpanBuilder(algebra)
    labels = algebra.labels

    for p in range(algebra.dim):
        for q in range(algebra.dim):
            if not (algebra.table[p, q] != 0).any():
                builder.offer(algebra.basis_element(p), algebra.basis_element(q), f"basis:{labels[p]},{labels[q]}")

    if algebra.has_blocks:
        unit = algebra.identity()
        for idempotent in diagonal_idempotents(algebra):
            complement = unit - idempotent
            builder.offer(idempotent, complement, "idempotent:P,I-P")
            for basis in algebra.basis():
                product = multiply(basis, idempotent)
                builder.offer(basis - product, idempotent, "idempotent:A-AP,P")
                builder.offer(product, complement, "idempotent:AP,I-P")

    draws = _saturate(builder, make_rng(seed), window=window)
    logger.info(
        "Built zero-product span",
        algebra=algebra.name,
        dim=builder.accumulator.dim,
        draws=draws,
        seed=seed,
        elapsed=round(time.time() - started, 3),
    )
    return TensorSpanBasis(algebra, tuple(builder.pairs), tuple(builder.provenance), draws, seed)


def extend_span(span: TensorSpanBasis, draws: int = TIGHTNESS_DRAWS, seed: int = DEFAULT_SEED) -> TensorSpanBasis:
    """Append `draws` further saturation samples to an existing span"""
    builder = _SpanBuilder(span.algebra, span.accumulator())
    builder.pairs.extend(span.pairs)
    builder.provenance.extend(span.provenance)
    before = span.dim
    performed = _saturate(builder, make_rng(seed), draws=draws)
    logger.info("Extended zero-product span", algebra=span.algebra.name, before=before, after=builder.accumulator.dim)
    return TensorSpanBasis(span.algebra, tuple(builder.pairs), tuple(builder.provenance), span.draws + performed, span.seed)


@dataclass
class LevelSystem:
    """
    Affine system for the d^2 entries of L_n (flat index r*d + k is entry
    (r, k), column k being the image of b_k). Row provenance is the pair
    (span vector index, output coordinate).
    """
    algebra: Algebra
    level: int
    xi: Fraction
    rows: List[Row]
    rhs: List[Fraction]
    provenance: List[Tuple[int, int]]
    span_dim: int
    seed: int = DEFAULT_SEED

    @property
    def unknowns(self) -> int:
        return self.algebra.dim ** 2

    def residual(self, linear_map: LinMap) -> List[Fraction]:
        """rows . L_n - rhs for a candidate map"""
        flat = linear_map.matrix.reshape(-1)
        return [
            sum((value * flat[col] for col, value in row.items()), Fraction(0)) - target
            for row, target in zip(self.rows, self.rhs)
        ]

    def first_violation(self, linear_map: LinMap) -> Optional[int]:
        for index, value in enumerate(self.residual(linear_map)):
            if value != 0:
                return index
        return None


def assemble_level_system(prefix: MapFamily, xi: ScalarLike, span: TensorSpanBasis) -> LevelSystem:
    """
    One vector equation per span pair (A, B):

        L_n([A,B]_xi) - [L_n(A), B]_xi - [A, L_n(B)]_xi = sum_{0<i<n} [L_i(A), L_{n-i}(B)]_xi
    """
    if not isinstance(prefix, MapFamily):
        raise PreconditionError("Malformed prefix: expected a map family with the identity at level 0")
    xi = to_scalar(xi)
    algebra = prefix.algebra
    if not same_algebra(span.algebra, algebra):
        raise PreconditionError("Span and prefix live in different algebras",
                                details={"span": span.algebra.name, "prefix": algebra.name})

    d = algebra.dim
    level = prefix.order + 1
    tensor = algebra.bracket_tensor(xi)

    rows, rhs, provenance = [], [], []
    for index, (left, right) in enumerate(span.pairs):
        a, b = left.vector, right.vector
        bracket = np.tensordot(b, np.tensordot(a, tensor, axes=([0], [0])), axes=([0], [0]))
        right_action = np.tensordot(tensor, b, axes=([1], [0]))      # [b_t, B]_xi, (t, s)
        left_action = np.tensordot(a, tensor, axes=([0], [0]))       # [A, b_t]_xi, (t, s)

        coefficients = zeros(d, d, d)                                # (equation s, row t, column k)
        for s in range(d):
            coefficients[s, s, :] = bracket
        coefficients = coefficients - right_action.T[:, :, None] * a[None, None, :]
        coefficients = coefficients - left_action.T[:, :, None] * b[None, None, :]

        known = algebra.zero()
        for i in range(1, level):
            known = known + xi_bracket(prefix[i](left), prefix[level - i](right), xi)

        for s, equation in enumerate(coefficients.reshape(d, d * d)):
            rows.append(dense_to_row(equation))
            rhs.append(known.coords[s])
            provenance.append((index, s))

    logger.debug("Assembled level system", algebra=algebra.name, level=level, rows=len(rows), unknowns=d * d)
    return LevelSystem(algebra, level, xi, rows, rhs, provenance, span.dim, span.seed)


@dataclass
class SolutionSpace:
    """Affine space particular + span(homogeneous) of admissible L_n"""
    level: int
    xi: Fraction
    particular: LinMap
    homogeneous: Tuple[LinMap, ...]
    constraint_count: int
    span_dim: int
    seed: int = DEFAULT_SEED

    @property
    def algebra(self) -> Algebra:
        return self.particular.algebra

    @property
    def dim(self) -> int:
        return len(self.homogeneous)

    def member(self, coefficients: Sequence[ScalarLike]) -> LinMap:
        if len(coefficients) != self.dim:
            raise PreconditionError(
                "Coefficient count does not match the solution dimension",
                details={"expected": self.dim, "given": len(coefficients)},
            )
        result = self.particular
        for coefficient, basis_map in zip(coefficients, self.homogeneous):
            result = result + basis_map * to_scalar(coefficient)
        return result

    def random_member(self, rng: np.random.Generator, bound: int = RANDOM_ENTRY_BOUND) -> LinMap:
        return self.member([int(v) for v in rng.integers(-bound, bound + 1, size=self.dim)])


def solve_level(system: LevelSystem) -> SolutionSpace:
    d = system.algebra.dim
    if system.unknowns > MAX_UNKNOWNS:
        raise PreconditionError(
            "Level system exceeds the unknown limit",
            details={"unknowns": system.unknowns, "limit": MAX_UNKNOWNS},
        )

    started = time.time()
    try:
        particular, basis = solve_affine(system.rows, system.rhs, system.unknowns)
    except InconsistentSystemError as exc:
        witness = exc.details.get("witness_row")
        if witness is not None:
            span_index, coordinate = system.provenance[witness]
            exc.details.update({
                "level": system.level,
                "span_vector": span_index,
                "coordinate": system.algebra.labels[coordinate],
            })
        logger.warning("Level system is inconsistent", **exc.details)
        raise

    def to_map(vector: Sequence[Fraction]) -> LinMap:
        return LinMap(system.algebra, np.array(vector, dtype=object).reshape(d, d))

    space = SolutionSpace(
        level=system.level,
        xi=system.xi,
        particular=to_map(particular),
        homogeneous=tuple(to_map(vector) for vector in basis),
        constraint_count=len(system.rows),
        span_dim=system.span_dim,
        seed=system.seed,
    )
    logger.info(
        "Solved level",
        algebra=system.algebra.name,
        level=system.level,
        xi=str(system.xi),
        rows=len(system.rows),
        unknowns=system.unknowns,
        dim=space.dim,
        elapsed=round(time.time() - started, 3),
    )
    return space


def select_map(space: SolutionSpace, system: LevelSystem, choice: Choice, rng: Callable[[], np.random.Generator]) -> LinMap:
    if isinstance(choice, LinMap):
        violation = system.first_violation(choice)
        if violation is not None:
            span_index, coordinate = system.provenance[violation]
            raise VerificationError(
                "Explicit choice does not satisfy the level system",
                details={"level": system.level, "span_vector": span_index, "coordinate": system.algebra.labels[coordinate]},
            )
        return choice
    if choice == "particular":
        return space.particular
    if choice == "random":
        return space.random_member(rng())
    if isinstance(choice, str):
        raise PreconditionError(f"Unknown choice rule {choice!r}")
    return space.member(list(choice))


def _extend(prefix: MapFamily,
            xi: ScalarLike,
            span: TensorSpanBasis,
            choice: Choice,
            rng: Callable[[], np.random.Generator]) -> Tuple[MapFamily, SolutionSpace]:
    system = assemble_level_system(prefix, xi, span)
    space = solve_level(system)
    return prefix.extend(select_map(space, system, choice, rng)), space


def extend_family(prefix: MapFamily,
                  xi: ScalarLike,
                  span: TensorSpanBasis,
                  choice: Choice = "particular",
                  seed: int = DEFAULT_SEED) -> MapFamily:
    """
    Append one admissible level chosen by `choice`: "particular", "random"
    (seeded integer combination of the homogeneous basis added to the
    particular solution), a coefficient sequence, or an explicit LinMap.
    """
    family, _ = _extend(prefix, xi, span, choice, lambda: make_rng(seed))
    return family


def grow_family(algebra: Algebra,
                xi: ScalarLike,
                levels: int,
                span: TensorSpanBasis,
                choice: Choice = "particular",
                seed: int = DEFAULT_SEED) -> Tuple[MapFamily, List[SolutionSpace]]:
    """Iterate solve/extend from the identity up to `levels` levels"""
    if levels < 1:
        raise PreconditionError(f"levels must be >= 1, got {levels}")
    generator = make_rng(seed)
    family = MapFamily((identity_map(algebra),))
    spaces = []
    for _ in range(levels):
        family, space = _extend(family, xi, span, choice, lambda: generator)
        spaces.append(space)
    return family, spaces


def sample_zero_product_pairs(algebra: Algebra, count: int, seed: int) -> List[Pair]:
    """Random A (a left zero divisor) paired with a random nonzero member of its right annihilator"""
    if count < 0:
        raise PreconditionError(f"count must be >= 0, got {count}")
    seeds = _zero_divisor_seeds(algebra)
    if not seeds:
        return []

    rng = make_rng(seed)
    pairs: List[Pair] = []
    while len(pairs) < count:
        left = _draw_zero_divisor(algebra, seeds, rng)
        if left.is_zero():
            continue
        annihilator = right_annihilator(algebra, left)
        weights = rng.integers(-RANDOM_ENTRY_BOUND, RANDOM_ENTRY_BOUND + 1, size=len(annihilator))
        right = algebra.zero()
        for weight, partner in zip(weights, annihilator):
            right = right + partner * int(weight)
        if right.is_zero():
            continue
        pairs.append((left, right))
    return pairs

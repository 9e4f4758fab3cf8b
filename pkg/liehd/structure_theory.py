"""
liehd - Structure Theory

Constructive side of the theory for zero-product (xi-)Lie higher derivations:

- transfer recursions between a family (L_n) and a delta sequence (delta_n),
  in both composition orders, and the inverse rebuild
- standard parts S, tau(P) of a level-1 map at an idempotent P
- extraction of the inner generator R_K on a block from rank-one images
- the Delta(T) + h decomposition of xi = 1 families, block by block
- the generalized recursion and the xi != 1 classification
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra_core import (
    Algebra,
    Element,
    RankOneSpec,
    ScalarLike,
    commutator,
    dual_pick,
    idempotent_decompose,
    identity_matrix,
    is_central,
    multiply,
    rank_one,
    to_scalar,
    zeros,
)
from .config import DEFAULT_SAMPLES, DEFAULT_SEED
from .errors import InconsistentSystemError, PreconditionError, VerificationError
from .linalg import solve_affine
from .log import get_logger
from .maps import (
    CheckResult,
    GeneratorSequence,
    LinMap,
    MapFamily,
    Violation,
    identity_map,
    inner_derivation,
    inner_higher,
    is_derivation,
    is_generalized_derivation,
    is_generalized_higher_derivation,
    is_higher_derivation,
    left_multiplication,
    unit_values_central,
    xi_condition_on_zero_products,
)
from .zeroprod_solver import Pair, sample_zero_product_pairs

logger = get_logger(__name__)


class Ordering(str, Enum):
    """Composition order of the transfer recursion"""
    A = "a"  # (n+1) L_{n+1} = sum_k L_{n-k} o delta_{k+1}
    B = "b"  # (n+1) L_{n+1} = sum_k delta_{k+1} o L_{n-k}


class Verdict(str, Enum):
    HIGHER_DERIVATION = "HigherDerivation"
    GENERALIZED_HIGHER_DERIVATION = "GeneralizedHigherDerivation"
    NOT_CLASSIFIED = "NotClassified"


@dataclass(frozen=True)
class DeltaSequence:
    deltas: Tuple[LinMap, ...]
    ordering: Ordering

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(self.deltas))
        object.__setattr__(self, "ordering", Ordering(self.ordering))
        if not self.deltas:
            raise PreconditionError("A delta sequence needs at least one map")

    @property
    def algebra(self) -> Algebra:
        return self.deltas[0].algebra

    @property
    def order(self) -> int:
        return len(self.deltas)

    def __eq__(self, other):
        if not isinstance(other, DeltaSequence):
            return NotImplemented
        return self.ordering == other.ordering and len(self.deltas) == len(other.deltas) and all(
            a == b for a, b in zip(self.deltas, other.deltas)
        )

    __hash__ = None


def _compose(ordering: Ordering, level_map: LinMap, delta: LinMap) -> LinMap:
    if ordering is Ordering.A:
        return level_map.compose(delta)
    return delta.compose(level_map)


def _pairs(family_or_algebra, witnesses: Optional[Sequence[Pair]], samples: int, seed: int) -> List[Pair]:
    if witnesses is not None:
        return list(witnesses)
    algebra = family_or_algebra if isinstance(family_or_algebra, Algebra) else family_or_algebra.algebra
    return sample_zero_product_pairs(algebra, samples, seed)


# -- transfer recursions ------------------------------------------------------------

def transfer_to_delta(family: MapFamily, ordering: Ordering = Ordering.A) -> DeltaSequence:
    """
    delta_1 = L_1 and
    delta_{n+1} = (n+1) L_{n+1} - sum_{k<n} L_{n-k} o delta_{k+1}   (ordering A)
    delta_{n+1} = (n+1) L_{n+1} - sum_{k<n} delta_{k+1} o L_{n-k}   (ordering B)
    """
    ordering = Ordering(ordering)
    if family.order < 1:
        raise PreconditionError("Transfer needs a family of order >= 1")
    deltas: List[LinMap] = []
    for n in range(family.order):
        total = family[n + 1] * (n + 1)
        for k in range(n):
            total = total - _compose(ordering, family[n - k], deltas[k])
        deltas.append(total)
    return DeltaSequence(tuple(deltas), ordering)


def rebuild_from_delta(sequence: DeltaSequence) -> MapFamily:
    """L_0 = id, L_{n+1} = 1/(n+1) sum_{k=0}^{n} (composition per ordering)"""
    algebra = sequence.algebra
    levels = [identity_map(algebra)]
    for n in range(sequence.order):
        total = _compose(sequence.ordering, levels[n], sequence.deltas[0])
        for k in range(1, n + 1):
            total = total + _compose(sequence.ordering, levels[n - k], sequence.deltas[k])
        levels.append(total * Fraction(1, n + 1))
    return MapFamily(tuple(levels))


def check_delta_sequence(sequence: DeltaSequence, xi: ScalarLike, witnesses: Sequence[Pair]) -> CheckResult:
    """Each delta_n satisfies the level-1 xi-condition on the witness pairs"""
    algebra = sequence.algebra
    for level, delta in enumerate(sequence.deltas, start=1):
        result = xi_condition_on_zero_products(MapFamily.from_levels(algebra, [delta]), xi, witnesses)
        if not result:
            violation = result.violation
            violation.level = level
            return CheckResult("delta_sequence", False, violation)
    return CheckResult("delta_sequence", True)


# -- standard parts and inner generators --------------------------------------------

def lie_standard_parts(delta: LinMap, idempotent: Element) -> Tuple[Element, Element]:
    """
    S = [delta(P), I - P] and tau(P) = P delta(P) P + (I - P) delta(P) (I - P).

    Verifies delta(P) = [P, S] + tau(P) and that tau(P) is central.
    """
    algebra = delta.algebra
    if multiply(idempotent, idempotent) != idempotent:
        raise PreconditionError("P is not idempotent", details={"P": repr(idempotent)})

    image = delta(idempotent)
    complement = algebra.identity() - idempotent
    tau = multiply(multiply(idempotent, image), idempotent) + multiply(multiply(complement, image), complement)
    shift = commutator(image, complement)

    if not is_central(tau):
        raise VerificationError("tau(P) is not central", details={"P": repr(idempotent), "tau": repr(tau)})
    if commutator(idempotent, shift) + tau != image:
        raise VerificationError("delta(P) != [P, S] + tau(P)", details={"P": repr(idempotent)})
    return shift, tau


def central_part(delta: LinMap, spec: RankOneSpec) -> Element:
    """tau of a rank-one operator, through its idempotent decomposition"""
    algebra = delta.algebra
    total = algebra.zero()
    for coefficient, idempotent in idempotent_decompose(algebra, spec):
        _, tau = lie_standard_parts(delta, idempotent)
        total = total + tau * coefficient
    return total


def extract_inner_generator(delta: LinMap, block: int) -> np.ndarray:
    """
    R_K with d(F) = R_K F - F R_K on the block, where d is delta minus its
    central part. Fixes x_K = e_1, f_K = dual_pick(e_1) and reads column i
    of R_K off d(e_i (x) f_K) x_K.
    """
    algebra = delta.algebra
    size = algebra.block_size(block)
    anchor = tuple(Fraction(int(index == 0)) for index in range(size))
    dual = dual_pick(algebra, block, anchor)

    def derivation_part(spec: RankOneSpec) -> Element:
        return delta(rank_one(algebra, spec)) - central_part(delta, spec)

    generator = zeros(size, size)
    for column in range(size):
        x = tuple(Fraction(int(index == column)) for index in range(size))
        image = algebra.block_matrix(derivation_part(RankOneSpec(block, x, dual)), block)
        generator[:, column] = image @ np.array(anchor, dtype=object)

    embedded = algebra.embed_block(block, generator)
    for row in range(size):
        for col in range(size):
            unit = RankOneSpec(block, tuple(Fraction(int(i == row)) for i in range(size)),
                               tuple(Fraction(int(i == col)) for i in range(size)))
            if derivation_part(unit) != commutator(embedded, rank_one(algebra, unit)):
                raise VerificationError(
                    "Inner generator does not reproduce the derivation part",
                    details={"block": block, "unit": algebra.labels[algebra.unit_index(block, row, col)]},
                )
    return generator


@dataclass(frozen=True)
class StandardSplit:
    """delta = ad_R + tau with tau central-valued"""
    inner: Element
    central: LinMap


def standard_split(delta: LinMap) -> StandardSplit:
    algebra = delta.algebra
    if not algebra.has_blocks:
        raise PreconditionError(f"standard_split needs block metadata; {algebra.name} has none")
    generator = algebra.zero()
    for block in range(len(algebra.blocks)):
        generator = generator + algebra.embed_block(block, extract_inner_generator(delta, block))
    central = delta - inner_derivation(generator)
    for index in range(algebra.dim):
        if not is_central(central.image(index)):
            raise VerificationError("Central part is not central-valued", details={"basis": algebra.labels[index]})
    return StandardSplit(generator, central)


# -- Delta(T) + h decomposition -------------------------------------------------------

@dataclass(frozen=True)
class BlockDecomposition:
    block: int
    generators: Tuple[np.ndarray, ...]    # T_K1 .. T_KN, zero trace
    functionals: Tuple[Tuple[Fraction, ...], ...]  # h_K1 .. h_KN as covectors on the algebra


@dataclass(frozen=True)
class Decomposition:
    algebra: Algebra
    blocks: Tuple[BlockDecomposition, ...]
    verified_pairs: int

    @property
    def order(self) -> int:
        return len(self.blocks[0].generators)

    def block_family(self, block: int) -> MapFamily:
        """Delta(T_K) for one block, generators embedded"""
        part = self.blocks[block]
        gens = tuple(self.algebra.embed_block(block, matrix) for matrix in part.generators)
        return inner_higher(self.algebra, GeneratorSequence(gens))

    def reconstruct(self) -> MapFamily:
        """L_n(A) = sum_K (Delta(T)_{Kn}(A) restricted to K + h_Kn(A) I_K)"""
        algebra = self.algebra
        levels = [zeros(algebra.dim, algebra.dim) for _ in range(self.order)]
        for part in self.blocks:
            inner = self.block_family(part.block)
            unit = algebra.block_identity(part.block).vector
            for n in range(1, self.order + 1):
                for index in range(algebra.dim):
                    block_image = algebra.block_matrix(inner[n].image(index), part.block)
                    column = algebra.embed_block(part.block, block_image).vector
                    levels[n - 1][:, index] += column + part.functionals[n - 1][index] * unit
        return MapFamily.from_levels(algebra, [LinMap(algebra, matrix) for matrix in levels])


def _zero_trace(matrix: np.ndarray) -> np.ndarray:
    size = matrix.shape[0]
    return matrix - (sum(matrix.diagonal(), Fraction(0)) / size) * identity_matrix(size)


def _solve_block_level(algebra: Algebra, block: int, level: int, residuals: List[np.ndarray]) -> np.ndarray:
    """T with residual_j - [T, A_j] scalar on the block for every basis element b_j"""
    size = algebra.block_size(block)
    rows, rhs = [], []
    for index, residual in enumerate(residuals):
        basis = algebra.block_matrix(algebra.basis_element(index), block)
        for r in range(size):
            for c in range(size):
                row: Dict[int, Fraction] = {}
                for t in range(size):
                    if basis[t, c]:
                        row[r * size + t] = row.get(r * size + t, Fraction(0)) + basis[t, c]
                    if basis[r, t]:
                        row[t * size + c] = row.get(t * size + c, Fraction(0)) - basis[r, t]
                if r == c:
                    row[size * size + index] = Fraction(1)
                rows.append({col: value for col, value in row.items() if value != 0})
                rhs.append(residual[r, c])
    try:
        solution, _ = solve_affine(rows, rhs, size * size + algebra.dim)
    except InconsistentSystemError as exc:
        raise VerificationError("Residual not scalar", details={"block": block, "level": level}) from exc
    return np.array(solution[:size * size], dtype=object).reshape(size, size)


def _scalar_residuals(algebra: Algebra, block: int, level: int,
                      generator: np.ndarray, residuals: List[np.ndarray]) -> Tuple[Fraction, ...]:
    size = algebra.block_size(block)
    functional = []
    for index, residual in enumerate(residuals):
        basis = algebra.block_matrix(algebra.basis_element(index), block)
        remainder = residual - (generator @ basis - basis @ generator)
        scalar = sum(remainder.diagonal(), Fraction(0)) / size
        if not np.array_equal(remainder, scalar * identity_matrix(size)):
            raise VerificationError(
                "Residual not scalar",
                details={"block": block, "level": level, "basis": algebra.labels[index]},
            )
        functional.append(Fraction(scalar))
    return tuple(functional)


def decompose_family(family: MapFamily,
                     xi: ScalarLike = 1,
                     witnesses: Optional[Sequence[Pair]] = None,
                     samples: int = DEFAULT_SAMPLES,
                     seed: int = DEFAULT_SEED) -> Decomposition:
    """
    Per block K and level n: L_n(A) = Delta(T_K)_n(A) + h_Kn(A) I on K.

    T_K1 comes from the inner generator of L_1; higher T_Kn solve
    [T, A] + h(A) I = L_n(A) - Delta(T_K1, .., T_K(n-1), 0)_n(A) on the block.
    Every h_Kn is checked against commutators of zero-product pairs.
    """
    if to_scalar(xi) != 1:
        raise PreconditionError("The Delta + h decomposition is stated for xi = 1", details={"xi": str(xi)})
    algebra = family.algebra
    if not algebra.has_blocks:
        raise PreconditionError(f"decompose_family needs block metadata; {algebra.name} has none")

    parts = []
    for block in range(len(algebra.blocks)):
        generators: List[np.ndarray] = []
        functionals: List[Tuple[Fraction, ...]] = []
        for level in range(1, family.order + 1):
            if generators:
                padded = [algebra.embed_block(block, matrix) for matrix in generators] + [algebra.zero()]
                known = inner_higher(algebra, GeneratorSequence(tuple(padded)))[level]
            else:
                known = None
            residuals = []
            for index in range(algebra.dim):
                image = family[level].image(index)
                if known is not None:
                    image = image - known.image(index)
                residuals.append(algebra.block_matrix(image, block))

            if level == 1:
                generator = extract_inner_generator(family[1], block)
            else:
                generator = _solve_block_level(algebra, block, level, residuals)
            generator = _zero_trace(generator)
            functionals.append(_scalar_residuals(algebra, block, level, generator, residuals))
            generators.append(generator)

        parts.append(BlockDecomposition(block, tuple(generators), tuple(functionals)))
        logger.debug("Decomposed block", algebra=algebra.name, block=block, levels=family.order)

    pairs = _pairs(algebra, witnesses, samples, seed)
    for left, right in pairs:
        bracket = commutator(left, right).coords
        for part in parts:
            for level, functional in enumerate(part.functionals, start=1):
                value = sum((h * c for h, c in zip(functional, bracket)), Fraction(0))
                if value != 0:
                    raise VerificationError(
                        "h does not annihilate a zero-product commutator",
                        details={"block": part.block, "level": level, "left": repr(left), "right": repr(right)},
                    )

    logger.info("Decomposed family", algebra=algebra.name, order=family.order, verified_pairs=len(pairs))
    return Decomposition(algebra, tuple(parts), len(pairs))


def decompose_level_one(linear_map: LinMap, **kwargs) -> Decomposition:
    return decompose_family(MapFamily.from_levels(linear_map.algebra, [linear_map]), **kwargs)


# -- generalized recursion and classification ----------------------------------------

@dataclass(frozen=True)
class GeneralizedSplit:
    """L(A) = delta(A) + L(I) A with L(I) central and delta a derivation"""
    derivation: LinMap
    unit_value: Element


def generalized_split(linear_map: LinMap) -> GeneralizedSplit:
    unit_value = linear_map(linear_map.algebra.identity())
    if not is_central(unit_value):
        raise VerificationError("L(I) is not central", details={"L(I)": repr(unit_value)})
    derivation = linear_map - left_multiplication(unit_value)
    result = is_derivation(derivation)
    if not result:
        raise VerificationError("L - L(I)(.) is not a derivation", details=result.violation.to_dict())
    return GeneralizedSplit(derivation, unit_value)


def associated_higher_derivation(family: MapFamily) -> MapFamily:
    """d = rebuild(tau, B) with tau_n(A) = delta_n(A) - delta_n(I) A, delta = transfer(F, B)"""
    deltas = transfer_to_delta(family, Ordering.B)
    unit = family.algebra.identity()
    taus = tuple(delta - left_multiplication(delta(unit)) for delta in deltas.deltas)
    return rebuild_from_delta(DeltaSequence(taus, Ordering.B))


def generalized_transfer(family: MapFamily,
                         associate: Optional[MapFamily] = None) -> Tuple[DeltaSequence, DeltaSequence]:
    """
    gamma = transfer(F, B) and tau = transfer(D, B); each gamma_n is checked
    to satisfy gamma_n(xy) = gamma_n(x) y + x tau_n(y) on all basis pairs.
    """
    associate = associate if associate is not None else associated_higher_derivation(family)
    if not is_higher_derivation(associate):
        raise PreconditionError("The associated family is not a higher derivation")
    gammas = transfer_to_delta(family, Ordering.B)
    taus = transfer_to_delta(associate, Ordering.B)
    for level, (gamma, tau) in enumerate(zip(gammas.deltas, taus.deltas), start=1):
        result = is_generalized_derivation(gamma, tau)
        if not result:
            details = result.violation.to_dict()
            details["level"] = level
            raise VerificationError("gamma_n is not a generalized derivation over tau_n", details=details)
    return gammas, taus


@dataclass(frozen=True)
class XiClassification:
    verdict: Verdict
    xi: Fraction
    associate: Optional[MapFamily] = None
    violation: Optional[Violation] = None


def classify_xi_family(family: MapFamily,
                       xi: ScalarLike,
                       witnesses: Optional[Sequence[Pair]] = None,
                       samples: int = DEFAULT_SAMPLES,
                       seed: int = DEFAULT_SEED) -> XiClassification:
    """
    xi != 0, 1: the family must be a higher derivation.
    xi = 0: the family must be a generalized higher derivation with the
    associate built from the transfer recursion, and every L_n(I) central.
    """
    xi = to_scalar(xi)
    if xi == 1:
        raise PreconditionError("Classification is not defined at xi = 1; use decompose_family")

    pairs = _pairs(family, witnesses, samples, seed)
    condition = xi_condition_on_zero_products(family, xi, pairs)
    if not condition:
        raise PreconditionError(
            "Family does not satisfy the xi-condition on zero products",
            details=condition.violation.to_dict(),
        )

    if xi != 0:
        result = is_higher_derivation(family)
        verdict = Verdict.HIGHER_DERIVATION if result else Verdict.NOT_CLASSIFIED
        logger.info("Classified family", xi=str(xi), verdict=verdict.value)
        return XiClassification(verdict, xi, violation=result.violation)

    central = unit_values_central(family)
    if not central:
        return XiClassification(Verdict.NOT_CLASSIFIED, xi, violation=central.violation)

    associate = associated_higher_derivation(family)
    associate_check = is_higher_derivation(associate)
    if not associate_check:
        return XiClassification(Verdict.NOT_CLASSIFIED, xi, violation=associate_check.violation)

    result = is_generalized_higher_derivation(family, associate)
    if not result:
        return XiClassification(Verdict.NOT_CLASSIFIED, xi, associate=associate, violation=result.violation)
    logger.info("Classified family", xi=str(xi), verdict=Verdict.GENERALIZED_HIGHER_DERIVATION.value)
    return XiClassification(Verdict.GENERALIZED_HIGHER_DERIVATION, xi, associate=associate)

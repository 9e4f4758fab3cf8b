"""
liehd - Serialization

JSON documents for every artifact. Rationals are strings "p/q" (or "p"
when q = 1), so every round trip is bit-exact. Documents are validated with
pydantic models; output is canonical (sorted keys, two-space indent, one
trailing newline) so identical inputs give byte-identical files.
"""

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from .algebra_core import Algebra, build_custom_algebra, identity_matrix
from .errors import ArtifactError
from .maps import GeneratorSequence, LinMap, MapFamily, Violation
from .structure_theory import (
    BlockDecomposition,
    Decomposition,
    DeltaSequence,
    Ordering,
    Verdict,
    XiClassification,
)
from .zeroprod_solver import SolutionSpace

RATIONAL = re.compile(r"^-?\d+(/\d+)?$")

Matrix = List[List[str]]
Document = TypeVar("Document", bound=BaseModel)


# -- rationals ------------------------------------------------------------------------

def encode_rational(value: Any) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def decode_rational(text: Any) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ArtifactError(f"Expected a rational string, got {text!r}")
    text = str(text).strip()
    if not RATIONAL.match(text):
        raise ArtifactError(f"Malformed rational {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError as exc:
        raise ArtifactError(f"Zero denominator in {text!r}") from exc


def encode_vector(values: Sequence[Any]) -> List[str]:
    return [encode_rational(value) for value in values]


def decode_vector(values: Sequence[Any], length: Optional[int] = None) -> Tuple[Fraction, ...]:
    if length is not None and len(values) != length:
        raise ArtifactError(f"Expected a vector of length {length}, got {len(values)}")
    return tuple(decode_rational(value) for value in values)


def encode_matrix(matrix: np.ndarray) -> Matrix:
    return [encode_vector(row) for row in np.asarray(matrix, dtype=object)]


def decode_matrix(rows: Sequence[Sequence[Any]], size: int) -> np.ndarray:
    if len(rows) != size:
        raise ArtifactError(f"Expected a {size}x{size} matrix, got {len(rows)} rows")
    return np.array([decode_vector(row, size) for row in rows], dtype=object).reshape(size, size)


# -- documents ------------------------------------------------------------------------

class AlgebraDocument(BaseModel):
    name: str
    dim: int
    labels: List[str]
    unit: List[str]
    mul: List[Tuple[int, int, List[str]]]
    blocks: Optional[List[int]] = None


class FamilyDocument(BaseModel):
    algebra: str
    order: int
    levels: List[Matrix]


class SolutionDocument(BaseModel):
    level: int
    xi: str
    particular: Matrix
    homogeneous: List[Matrix]
    span_dim: int
    constraints: int
    seed: int


class BlockDocument(BaseModel):
    T: List[Matrix]
    h: List[List[str]]


class DecompositionDocument(BaseModel):
    algebra: str
    blocks: List[BlockDocument]
    verified_pairs: int


class DeltaDocument(BaseModel):
    algebra: str
    ordering: Ordering
    deltas: List[Matrix]


class GeneratorDocument(BaseModel):
    algebra: str
    gens: List[List[str]]


class ClassificationDocument(BaseModel):
    verdict: Verdict
    xi: str
    associate: Optional[FamilyDocument] = None
    violation: Optional[Dict[str, Any]] = None


def parse_document(model: Type[Document], data: Any) -> Document:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ArtifactError(f"Malformed {model.__name__}", details={"errors": exc.errors(include_url=False)}) from exc


def _check_algebra(name: str, algebra: Algebra):
    if name != algebra.name:
        raise ArtifactError("Artifact belongs to a different algebra", details={"file": name, "expected": algebra.name})


# -- algebras ------------------------------------------------------------------------

def algebra_to_dict(algebra: Algebra) -> Dict[str, Any]:
    products = []
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            coords = algebra.table[i, j]
            if (coords != 0).any():
                products.append([i, j, encode_vector(coords)])
    return {
        "name": algebra.name,
        "dim": algebra.dim,
        "labels": list(algebra.labels),
        "unit": encode_vector(algebra.unit),
        "mul": products,
        "blocks": list(algebra.blocks) if algebra.blocks is not None else None,
    }


def algebra_from_dict(data: Any) -> Algebra:
    document = parse_document(AlgebraDocument, data)
    if len(document.labels) != document.dim:
        raise ArtifactError("Label count does not match dim", details={"dim": document.dim, "labels": len(document.labels)})
    products = {(i, j): decode_vector(coords, document.dim) for i, j, coords in document.mul}
    return build_custom_algebra(
        document.name,
        document.labels,
        products,
        decode_vector(document.unit, document.dim),
        blocks=document.blocks,
    )


# -- families --------------------------------------------------------------------------

def family_to_dict(family: MapFamily) -> Dict[str, Any]:
    """Canonical form: levels 1..N, level 0 omitted"""
    return {
        "algebra": family.algebra.name,
        "order": family.order,
        "levels": [encode_matrix(linear_map.matrix) for linear_map in family.maps[1:]],
    }


def family_from_dict(data: Any, algebra: Algebra) -> MapFamily:
    document = data if isinstance(data, FamilyDocument) else parse_document(FamilyDocument, data)
    _check_algebra(document.algebra, algebra)
    matrices = [decode_matrix(level, algebra.dim) for level in document.levels]
    if len(matrices) == document.order + 1:
        if not np.array_equal(matrices[0], identity_matrix(algebra.dim)):
            raise ArtifactError("Level 0 of a family must be the identity")
        matrices = matrices[1:]
    if len(matrices) != document.order:
        raise ArtifactError("Level count does not match order", details={"order": document.order, "levels": len(matrices)})
    return MapFamily.from_levels(algebra, [LinMap(algebra, matrix) for matrix in matrices])


# -- solution spaces -------------------------------------------------------------------

def solution_to_dict(space: SolutionSpace) -> Dict[str, Any]:
    return {
        "level": space.level,
        "xi": encode_rational(space.xi),
        "particular": encode_matrix(space.particular.matrix),
        "homogeneous": [encode_matrix(linear_map.matrix) for linear_map in space.homogeneous],
        "span_dim": space.span_dim,
        "constraints": space.constraint_count,
        "seed": space.seed,
    }


def solution_from_dict(data: Any, algebra: Algebra) -> SolutionSpace:
    document = parse_document(SolutionDocument, data)
    d = algebra.dim
    return SolutionSpace(
        level=document.level,
        xi=decode_rational(document.xi),
        particular=LinMap(algebra, decode_matrix(document.particular, d)),
        homogeneous=tuple(LinMap(algebra, decode_matrix(matrix, d)) for matrix in document.homogeneous),
        constraint_count=document.constraints,
        span_dim=document.span_dim,
        seed=document.seed,
    )


# -- structure theory artifacts ------------------------------------------------------------

def decomposition_to_dict(decomposition: Decomposition) -> Dict[str, Any]:
    return {
        "algebra": decomposition.algebra.name,
        "blocks": [
            {
                "T": [encode_matrix(matrix) for matrix in part.generators],
                "h": [encode_vector(functional) for functional in part.functionals],
            }
            for part in decomposition.blocks
        ],
        "verified_pairs": decomposition.verified_pairs,
    }


def decomposition_from_dict(data: Any, algebra: Algebra) -> Decomposition:
    document = parse_document(DecompositionDocument, data)
    _check_algebra(document.algebra, algebra)
    if algebra.blocks is None or len(document.blocks) != len(algebra.blocks):
        raise ArtifactError("Decomposition block count does not match the algebra")
    parts = []
    for block, part in enumerate(document.blocks):
        size = algebra.blocks[block]
        parts.append(BlockDecomposition(
            block,
            tuple(decode_matrix(matrix, size) for matrix in part.T),
            tuple(decode_vector(functional, algebra.dim) for functional in part.h),
        ))
    return Decomposition(algebra, tuple(parts), document.verified_pairs)


def delta_to_dict(sequence: DeltaSequence) -> Dict[str, Any]:
    return {
        "algebra": sequence.algebra.name,
        "ordering": sequence.ordering.value,
        "deltas": [encode_matrix(delta.matrix) for delta in sequence.deltas],
    }


def delta_from_dict(data: Any, algebra: Algebra) -> DeltaSequence:
    document = parse_document(DeltaDocument, data)
    _check_algebra(document.algebra, algebra)
    deltas = tuple(LinMap(algebra, decode_matrix(matrix, algebra.dim)) for matrix in document.deltas)
    return DeltaSequence(deltas, document.ordering)


def classification_to_dict(classification: XiClassification) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "verdict": classification.verdict.value,
        "xi": encode_rational(classification.xi),
    }
    if classification.associate is not None:
        data["associate"] = family_to_dict(classification.associate)
    if classification.violation is not None:
        data["violation"] = classification.violation.to_dict()
    return data


def classification_from_dict(data: Any, algebra: Algebra) -> XiClassification:
    document = parse_document(ClassificationDocument, data)
    associate = family_from_dict(document.associate, algebra) if document.associate else None
    violation = None
    if document.violation:
        raw = document.violation
        violation = Violation(
            level=int(raw["level"]),
            left=raw["left"],
            right=raw["right"],
            discrepancy=algebra.element(decode_vector(raw["discrepancy"], algebra.dim)),
            witness=raw.get("witness"),
        )
    return XiClassification(document.verdict, decode_rational(document.xi), associate, violation)


# -- generator sequences ------------------------------------------------------------

def generators_to_dict(gens: GeneratorSequence) -> Dict[str, Any]:
    return {
        "algebra": gens.gens[0].algebra.name,
        "gens": [encode_vector(element.coords) for element in gens.gens],
    }


def generators_from_dict(data: Any, algebra: Algebra) -> GeneratorSequence:
    document = parse_document(GeneratorDocument, data)
    _check_algebra(document.algebra, algebra)
    if not document.gens:
        raise ArtifactError("Generator sequence is empty")
    return GeneratorSequence(tuple(algebra.from_vector(decode_vector(coords, algebra.dim)) for coords in document.gens))


# -- files ------------------------------------------------------------------------

def dumps(data: Dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(path: Path, data: Dict[str, Any]):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(data))
    except OSError as exc:
        raise ArtifactError(f"Cannot write {path}: {exc}") from exc


def read_json(path: Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise ArtifactError(f"Cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"Malformed JSON in {path}", details={"line": exc.lineno, "column": exc.colno}) from exc

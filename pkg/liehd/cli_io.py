"""
liehd - Command Line

Click front end over the workbench. Every command reads its inputs, runs one
operation, and writes its artifacts plus a report.json into --out. Files
are canonical JSON, so identical flags and seed give byte-identical output;
wall time only enters the report with --timing.

Exit codes: 0 success, 2 verification/precondition failure, 3 inconsistent
level system, 4 I/O or parse error.
"""

import functools
import json
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click
from pydantic import BaseModel, ValidationError, field_validator
from rich.console import Console
from rich.table import Table

from .algebra_core import Algebra, build_block_diagonal, build_matrix_algebra, center, random_element
from .config import (
    DEFAULT_LEVELS,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    LOG_LEVEL,
    MAX_SEED,
    RANDOM_ENTRY_BOUND,
)
from .errors import (
    EXIT_IO,
    EXIT_OK,
    EXIT_VERIFICATION,
    ArtifactError,
    PreconditionError,
    VerificationError,
    WorkbenchError,
)
from .log import configure_logging, get_logger
from .maps import (
    CheckResult,
    GeneratorSequence,
    MapFamily,
    identity_map,
    inner_higher,
    is_higher_derivation,
    is_lie_higher_derivation,
    unit_values_central,
    xi_condition_on_zero_products,
)
from .serialization import (
    algebra_from_dict,
    algebra_to_dict,
    classification_to_dict,
    decomposition_to_dict,
    delta_from_dict,
    delta_to_dict,
    family_from_dict,
    family_to_dict,
    generators_from_dict,
    generators_to_dict,
    read_json,
    solution_to_dict,
    write_json,
)
from .structure_theory import (
    Ordering,
    Verdict,
    check_delta_sequence,
    classify_xi_family,
    decompose_family,
    rebuild_from_delta,
    transfer_to_delta,
)
from .zeroprod_solver import (
    assemble_level_system,
    make_rng,
    sample_zero_product_pairs,
    select_map,
    solve_level,
    zero_product_span,
)

logger = get_logger(__name__)


class RunConfig(BaseModel):
    """Validated flags of one command invocation"""
    command: str
    algebra: str
    xi: Optional[str] = None
    levels: int = DEFAULT_LEVELS
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    out: Path = Path("out")
    family: Optional[Path] = None
    delta: Optional[Path] = None
    generators: Optional[Path] = None
    ordering: Ordering = Ordering.A
    choice: str = "particular"
    timing: bool = False

    @field_validator("xi")
    @classmethod
    def xi_is_rational(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return value
        try:
            Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"xi must be an exact rational p/q, got {value!r}") from exc
        return value

    @field_validator("levels")
    @classmethod
    def levels_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("levels must be >= 1")
        return value

    @field_validator("seed")
    @classmethod
    def seed_fits_64_bits(cls, value: int) -> int:
        if not 0 <= value <= MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return value

    @field_validator("samples")
    @classmethod
    def samples_nonnegative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("samples must be >= 0")
        return value

    @field_validator("choice")
    @classmethod
    def choice_known(cls, value: str) -> str:
        if value not in ("particular", "random"):
            raise ValueError("choice must be 'particular' or 'random'")
        return value

    @property
    def xi_value(self) -> Fraction:
        return Fraction(self.xi if self.xi is not None else 1)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"timing"})


class LevelSummary(BaseModel):
    level: int
    dim: int
    constraints: int


class CheckSummary(BaseModel):
    check: str
    ok: bool
    level: Optional[int] = None
    pairs: Optional[int] = None
    violation: Optional[Dict[str, Any]] = None


class Report(BaseModel):
    command: str
    config: Dict[str, Any]
    span: Optional[Dict[str, int]] = None
    levels: List[LevelSummary] = []
    checks: List[CheckSummary] = []
    artifacts: List[str] = []
    error: Optional[Dict[str, Any]] = None
    exit_code: int = EXIT_OK
    timing: Optional[float] = None

    def add_check(self, result: CheckResult, level: Optional[int] = None, pairs: Optional[int] = None) -> CheckResult:
        violation = result.violation.to_dict() if result.violation else None
        self.checks.append(CheckSummary(check=result.name, ok=result.ok, level=level, pairs=pairs, violation=violation))
        return result

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


def _jsonable(details: Dict[str, Any]) -> Dict[str, Any]:
    return json.loads(json.dumps(details, default=str))


def load_algebra(source: str) -> Algebra:
    """Builtin grammar: matrix:<d>, blocks:<d1,d2,...>, file:<path>"""
    kind, _, argument = source.partition(":")
    try:
        if kind == "matrix":
            return build_matrix_algebra(int(argument))
        if kind == "blocks":
            return build_block_diagonal([int(size) for size in argument.split(",")])
    except ValueError as exc:
        if isinstance(exc, WorkbenchError):
            raise
        raise ArtifactError(f"Malformed algebra source {source!r}") from exc
    if kind == "file":
        return algebra_from_dict(read_json(Path(argument)))
    raise ArtifactError(f"Unknown algebra source {source!r}", details={"expected": "matrix:<d> | blocks:<d1,...> | file:<path>"})


def _require(path: Optional[Path], flag: str) -> Path:
    if path is None:
        raise ArtifactError(f"{flag} is required for this command")
    return path


def _emit(config: RunConfig, report: Report, name: str, data: Dict[str, Any]):
    write_json(config.out / name, data)
    report.artifacts.append(name)


def render_summary(report: Report, console: Optional[Console] = None):
    console = console or Console()
    table = Table(title=f"liehd {report.command}")
    table.add_column("check")
    table.add_column("level")
    table.add_column("result")
    table.add_column("first violation")
    for level in report.levels:
        table.add_row("solve", str(level.level), f"dim {level.dim}", f"{level.constraints} constraints")
    for check in report.checks:
        violation = ""
        if check.violation:
            violation = f"level {check.violation['level']}: ({check.violation['left']}, {check.violation['right']})"
        table.add_row(check.check, "" if check.level is None else str(check.level), "pass" if check.ok else "FAIL", violation)
    console.print(table)
    if report.error:
        console.print(f"error: {report.error['message']}")


def workbench_command(name: str):
    """Validate flags, run the command body, always write report.json, exit with the mapped code"""

    def decorator(body: Callable[[RunConfig, Report], Optional[int]]):
        @functools.wraps(body)
        def command(**options):
            started = time.time()
            try:
                config = RunConfig(command=name, **options)
            except ValidationError as exc:
                click.echo(f"error: invalid options: {exc.errors(include_url=False)}", err=True)
                raise SystemExit(EXIT_IO)

            logger.info("Command started", command=name, algebra=config.algebra)
            report = Report(command=name, config=config.echo())
            try:
                exit_code = body(config, report) or EXIT_OK
            except WorkbenchError as exc:
                logger.error("Command failed", command=name, error=exc.message, details=_jsonable(exc.details))
                report.error = {"type": type(exc).__name__, "message": exc.message, "details": _jsonable(exc.details)}
                exit_code = exc.exit_code

            report.exit_code = exit_code
            elapsed = round(time.time() - started, 3)
            if config.timing:
                report.timing = elapsed
            try:
                write_json(config.out / "report.json", report.to_dict())
            except ArtifactError as exc:
                click.echo(f"error: {exc.message}", err=True)
                raise SystemExit(EXIT_IO)

            render_summary(report)
            logger.info("Command finished", command=name, exit_code=exit_code, elapsed=elapsed)
            raise SystemExit(exit_code)

        return command

    return decorator


def algebra_option(func):
    return click.option("--algebra", required=True, help="matrix:<d>, blocks:<d1,d2,...> or file:<path>")(func)


def common_options(func):
    func = click.option("--timing", is_flag=True, default=False, help="Include wall time in the report")(func)
    func = click.option("--out", type=click.Path(path_type=Path), default=Path("out"), show_default=True,
                        help="Output directory")(func)
    func = click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="64-bit RNG seed")(func)
    return algebra_option(func)


def samples_option(func):
    return click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True,
                        help="Sampled zero-product pairs for verification")(func)


def family_option(func):
    return click.option("--family", type=click.Path(path_type=Path), help="MapFamily JSON file")(func)


def xi_option(default: Optional[str]):
    return click.option("--xi", default=default, show_default=True, help="Exact rational p/q")


@click.group()
@click.option("--log-level", default=LOG_LEVEL, show_default=True, help="Log level for stderr logs")
def cli(log_level: str):
    """Exact workbench for zero-product (xi-)Lie higher derivations."""
    configure_logging(log_level)


@cli.command("algebra")
@common_options
@workbench_command("algebra")
def cmd_algebra(config: RunConfig, report: Report):
    """Write the algebra as JSON."""
    algebra = load_algebra(config.algebra)
    report.span = {"dim": algebra.dim, "center_dim": len(center(algebra))}
    _emit(config, report, "algebra.json", algebra_to_dict(algebra))


@cli.command("inner")
@common_options
@click.option("--levels", type=int, default=DEFAULT_LEVELS, show_default=True)
@click.option("--generators", type=click.Path(path_type=Path), help="Generator sequence JSON (default: seeded random)")
@workbench_command("inner")
def cmd_inner(config: RunConfig, report: Report):
    """Emit the inner higher derivation of a generator sequence."""
    algebra = load_algebra(config.algebra)
    if config.generators is not None:
        gens = generators_from_dict(read_json(config.generators), algebra)
    else:
        rng = make_rng(config.seed)
        gens = GeneratorSequence(tuple(random_element(algebra, rng, RANDOM_ENTRY_BOUND) for _ in range(config.levels)))
    family = inner_higher(algebra, gens)
    report.add_check(is_higher_derivation(family))
    _emit(config, report, "generators.json", generators_to_dict(gens))
    _emit(config, report, "family.json", family_to_dict(family))


@cli.command("solve")
@common_options
@xi_option("1")
@click.option("--levels", type=int, default=DEFAULT_LEVELS, show_default=True)
@click.option("--choice", type=click.Choice(["particular", "random"]), default="particular", show_default=True)
@samples_option
@workbench_command("solve")
def cmd_solve(config: RunConfig, report: Report):
    """Solve level by level and grow one family."""
    algebra = load_algebra(config.algebra)
    span = zero_product_span(algebra, config.seed)
    report.span = {"dim": span.dim, "draws": span.draws}

    rng = make_rng(config.seed)
    family = MapFamily((identity_map(algebra),))
    for _ in range(config.levels):
        system = assemble_level_system(family, config.xi_value, span)
        space = solve_level(system)
        report.levels.append(LevelSummary(level=space.level, dim=space.dim, constraints=space.constraint_count))
        _emit(config, report, f"level_{space.level}.json", solution_to_dict(space))
        family = family.extend(select_map(space, system, config.choice, lambda: rng))

    _emit(config, report, "family.json", family_to_dict(family))
    witnesses = sample_zero_product_pairs(algebra, config.samples, (config.seed + 1) % (MAX_SEED + 1))
    report.add_check(xi_condition_on_zero_products(family, config.xi_value, witnesses))
    report.add_check(unit_values_central(family))


def _load_family(config: RunConfig, algebra: Algebra) -> MapFamily:
    return family_from_dict(read_json(_require(config.family, "--family")), algebra)


def _structure_check(family: MapFamily, xi: Fraction, witnesses) -> Optional[CheckResult]:
    """Decomposability as Delta(T) + h at xi = 1, the classification verdict otherwise"""
    if xi == 1 and not family.algebra.has_blocks:
        return None
    name = "delta_plus_h_decomposition" if xi == 1 else "xi_classification"
    try:
        if xi == 1:
            decompose_family(family, 1, witnesses=witnesses)
            return CheckResult(name, True)
        classification = classify_xi_family(family, xi, witnesses=witnesses)
    except (PreconditionError, VerificationError) as exc:
        logger.info("Structure check failed", check=name, error=exc.message)
        return CheckResult(name, False)
    verdict = classification.verdict
    return CheckResult(f"{name}:{verdict.value}", verdict is not Verdict.NOT_CLASSIFIED, classification.violation)


@cli.command("verify")
@common_options
@xi_option("1")
@family_option
@samples_option
@workbench_command("verify")
def cmd_verify(config: RunConfig, report: Report):
    """Run the definitional checks, the sampled zero-product check and the structure check."""
    algebra = load_algebra(config.algebra)
    family = _load_family(config, algebra)
    witnesses = sample_zero_product_pairs(algebra, config.samples, config.seed)
    report.add_check(is_higher_derivation(family))
    report.add_check(is_lie_higher_derivation(family))
    report.add_check(unit_values_central(family))
    condition = report.add_check(xi_condition_on_zero_products(family, config.xi_value, witnesses), pairs=len(witnesses))
    if not condition:
        return EXIT_VERIFICATION
    structure = _structure_check(family, config.xi_value, witnesses)
    if structure is not None:
        report.add_check(structure, pairs=len(witnesses))
    return EXIT_OK


@cli.command("decompose")
@common_options
@family_option
@samples_option
@workbench_command("decompose")
def cmd_decompose(config: RunConfig, report: Report):
    """Decompose a xi = 1 family as Delta(T) + h per block."""
    algebra = load_algebra(config.algebra)
    family = _load_family(config, algebra)
    decomposition = decompose_family(family, 1, samples=config.samples, seed=config.seed)
    report.add_check(CheckResult("h_kills_zero_product_commutators", True), pairs=decomposition.verified_pairs)
    rebuilt = report.add_check(CheckResult("reconstructs_family", decomposition.reconstruct() == family))
    _emit(config, report, "decomposition.json", decomposition_to_dict(decomposition))
    return EXIT_OK if rebuilt else EXIT_VERIFICATION


@cli.command("transfer")
@common_options
@family_option
@xi_option("1")
@click.option("--ordering", type=click.Choice(["a", "b"]), default="a", show_default=True)
@samples_option
@workbench_command("transfer")
def cmd_transfer(config: RunConfig, report: Report):
    """Compute the delta sequence of a family."""
    algebra = load_algebra(config.algebra)
    family = _load_family(config, algebra)
    sequence = transfer_to_delta(family, config.ordering)
    witnesses = sample_zero_product_pairs(algebra, config.samples, config.seed)
    report.add_check(check_delta_sequence(sequence, config.xi_value, witnesses))
    _emit(config, report, "delta.json", delta_to_dict(sequence))


@cli.command("rebuild")
@common_options
@click.option("--delta", type=click.Path(path_type=Path), help="DeltaSequence JSON file")
@workbench_command("rebuild")
def cmd_rebuild(config: RunConfig, report: Report):
    """Rebuild a family from a delta sequence."""
    algebra = load_algebra(config.algebra)
    sequence = delta_from_dict(read_json(_require(config.delta, "--delta")), algebra)
    _emit(config, report, "family.json", family_to_dict(rebuild_from_delta(sequence)))


@cli.command("classify")
@common_options
@family_option
@xi_option(None)
@samples_option
@workbench_command("classify")
def cmd_classify(config: RunConfig, report: Report):
    """Classify a family satisfying the xi-condition (xi != 1)."""
    algebra = load_algebra(config.algebra)
    family = _load_family(config, algebra)
    if config.xi is None:
        raise ArtifactError("--xi is required for classify")
    classification = classify_xi_family(family, config.xi_value, samples=config.samples, seed=config.seed)
    report.add_check(CheckResult(classification.verdict.value, classification.verdict is not Verdict.NOT_CLASSIFIED,
                                 classification.violation))
    _emit(config, report, "classification.json", classification_to_dict(classification))
    return EXIT_OK if classification.verdict is not Verdict.NOT_CLASSIFIED else EXIT_VERIFICATION


def main():
    cli()

"""Command-line runner for the verification suites and the Cayley experiments."""

import argparse
import csv
import io
import json
import re
import sys
from collections.abc import Sequence
from dataclasses import fields, is_dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

from aws_lambda_powertools import Logger, Tracer
from aws_lambda_powertools.utilities.validation import validate
from aws_lambda_powertools.utilities.validation.exceptions import (
    SchemaValidationError,
)

from .cbset import (
    SetExpr,
    derived_cardinalities,
    rank,
    set_from_json,
)
from .constants import (
    BILIPSCHITZ_K_MAX,
    BS_BALL_N_MAX,
    BS_N_MAX,
    CERTIFICATE_K_MAX,
    COMMAND_BALL,
    COMMAND_DISTORTION,
    COMMAND_RANK,
    COMMAND_VERIFY,
    DEFAULT_BALL_RADIUS,
    DEFAULT_BFS_BUDGET,
    DEFAULT_RATIO_M_MAX,
    DEFAULT_SAMPLE_COUNT,
    DEFAULT_SEED,
    DEFAULT_VERIFY_M_MAX,
    DIAGONAL_DEFAULT_M_MAX,
    ERROR_IDENTITY_FAILED,
    ERROR_PARSE,
    EXIT_ASSERTION_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    FORMAT_CSV,
    FORMAT_JSON,
    GROUP_BS,
    GROUP_H5_FULL,
    GROUP_H5_GAMMA1,
    GROUP_H5_GAMMA2,
    H5_N_MAX,
    LETTER_BOUND_M_MAX,
    LOG_LEVEL,
    MATHER_BOOKKEEPING_BOUND,
    MATHER_VERIFY_M_MAX,
    SUITE_BS,
    SUITE_CERTIFICATE,
    SUITE_DIAGONAL,
    SUITE_H5,
    SUITE_MATHER,
    SUITE_PIPELINE,
    SYSTEM_NAME,
    THREADS,
)
from .constructions import (
    MatherParams,
    bilipschitz_report,
    certificate_undistorted,
    construction_map,
    diagonal_trick,
    distortion_report,
    element_setup,
    mather_commutators,
    mather_setup,
    rank_n_pieces,
)
from .exceptions import (
    ConfigError,
    GplabError,
    IdentityFailedError,
    InvalidBumpError,
    ParseError,
)
from .gpl import Homeo, breakset, gpl_from_json
from .grouplab import (
    DyadicAffine,
    GroupElement,
    bfs_ball,
    bs_generators,
    bs_report,
    builtin_group,
    distortion_table,
    element_from_json,
    elementary,
    growth_exponent,
    h5_report,
)
from .plcore import Interval, format_rational, parse_rational, pl_from_json
from .schemas import RANK_INPUT_SCHEMA, RUN_CONFIG_SCHEMA

logger = Logger(service=SYSTEM_NAME, level=LOG_LEVEL, stream=sys.stderr)
tracer = Tracer(service=SYSTEM_NAME)

_ELEMENTARY_NAME = re.compile(r"^e([1-5])([1-5])$")
_CONFIG_ERRORS = (
    ConfigError,
    ParseError,
    InvalidBumpError,
    SchemaValidationError,
    json.JSONDecodeError,
    OSError,
)

type Report = tuple[dict[str, Any], list[dict[str, Any]]]


def to_jsonable(value: Any) -> Any:
    """Convert report values into JSON-ready data.

    Fractions become "p/q" strings and intervals become [lo, hi] pairs.

    Returns:
        Any: Nested dicts, lists, strings, numbers and booleans.

    """
    match value:
        case bool() | int() | str() | None:
            return value
        case Fraction():
            return format_rational(value)
        case float():
            return value
        case Interval():
            return value.to_json()
        case Enum():
            return str(value.value)
        case dict():
            return {str(k): to_jsonable(v) for k, v in value.items()}
        case list() | tuple():
            return [to_jsonable(v) for v in value]
        case _ if is_dataclass(value) and not isinstance(value, type):
            return {f.name: to_jsonable(getattr(value, f.name)) for f in fields(value)}
        case _:
            return str(value)


def _flatten(row: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def render(report: Report, output_format: str) -> str:
    """Render a report as JSON or as CSV of its table rows.

    Args:
        report (Report): The summary document and the table rows.
        output_format (str): "json" or "csv".

    Returns:
        str: The rendered text.

    """
    summary, rows = report
    if output_format == FORMAT_JSON:
        return json.dumps(to_jsonable({**summary, "rows": rows}), indent=2) + "\n"
    flat_rows = [_flatten(to_jsonable(row)) for row in rows]
    buffer = io.StringIO()
    if flat_rows:
        writer = csv.DictWriter(
            buffer, fieldnames=list(flat_rows[0]), lineterminator="\n"
        )
        writer.writeheader()
        writer.writerows(flat_rows)
    return buffer.getvalue()


def emit(text: str, out: Path | None) -> None:
    """Write a rendered report to a file or to stdout."""
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info("Report is written: %s", out)


def load_settings(args: argparse.Namespace) -> dict[str, Any]:
    """Merge the JSON config file with command-line flags and validate.

    Flags override file values; unset flags are ignored.

    Returns:
        dict[str, Any]: The validated settings.

    Raises:
        SchemaValidationError: If the merged settings violate the schema.

    """
    settings: dict[str, Any] = {}
    if args.config is not None:
        settings.update(json.loads(args.config.read_text(encoding="utf-8")))
    properties = RUN_CONFIG_SCHEMA["properties"]
    settings.update({
        k: v for k, v in vars(args).items() if k in properties and v is not None
    })
    validate(event=settings, schema=RUN_CONFIG_SCHEMA)
    return settings


def mather_params(settings: dict[str, Any]) -> MatherParams:
    """Mather layout from the "params" section, defaults elsewhere.

    Returns:
        MatherParams: The layout.

    """
    overrides = {
        k: parse_rational(v) for k, v in settings.get("params", {}).items()
    }
    return MatherParams(**overrides)


def resolve_element(group: str, element: str | dict[str, Any]) -> GroupElement:
    """Element named by a generator, by "eij" in H₅ or by a JSON document.

    Returns:
        GroupElement: The element.

    Raises:
        ParseError: If the name is unknown for the group.

    """
    if isinstance(element, dict):
        return element_from_json(element)
    generators = builtin_group(group)
    if element in generators.names:
        return generators.lookup(element)
    if group != GROUP_BS and (match := _ELEMENTARY_NAME.match(element)):
        i, j = int(match.group(1)), int(match.group(2))
        if i < j:
            return elementary(i, j)
    error_message = ERROR_PARSE.format(f"element of {group}", element)
    raise ParseError(error_message)


# Verification suites


def _suite_h5(settings: dict[str, Any]) -> Report:
    report = h5_report(settings.get("n_max", H5_N_MAX), logger=logger)
    summary = {
        "suite": SUITE_H5,
        "l1_stable": report.l1_stable,
        "l2_stable": report.l2_stable,
    }
    return summary, [to_jsonable(row) for row in report.rows]


def _suite_bs(settings: dict[str, Any]) -> Report:
    rows = [to_jsonable(row) for row in bs_report(settings.get("n_max", BS_N_MAX))]
    ball = bfs_ball(
        bs_generators(),
        2 * BS_BALL_N_MAX + 1,
        settings.get("budget", DEFAULT_BFS_BUDGET),
        THREADS,
        logger,
    )
    for row in rows[:BS_BALL_N_MAX]:
        n = row["n"]
        length = ball.length_of(DyadicAffine(0, Fraction(2**n)))
        if length is None or length > row["word_bound"]:
            error_message = ERROR_IDENTITY_FAILED.format(f"l(f^{2**n}) <= {2 * n + 1}")
            raise IdentityFailedError(error_message, witnesses=(n, length))
        row["ball_length"] = length
    return {"suite": SUITE_BS}, rows


def _suite_mather(settings: dict[str, Any]) -> Report:
    n = settings.get("n", 0)
    params = mather_params(settings)
    data = mather_setup(
        params, *rank_n_pieces(n, params.core), MATHER_BOOKKEEPING_BOUND, logger=logger
    )
    rows: list[dict[str, Any]] = []
    for m in range(1, settings.get("m_max", LETTER_BOUND_M_MAX) + 1):
        verify = m <= settings.get("verify_m_max", MATHER_VERIFY_M_MAX)
        _, row = mather_commutators(
            data,
            m,
            verify,
            settings.get("sample_count", DEFAULT_SAMPLE_COUNT),
            settings.get("seed", DEFAULT_SEED),
        )
        logger.debug(
            "Mather commutator checked", extra={"m": m, "count": row.letter_count}
        )
        rows.append(to_jsonable(row))
    summary = {
        "suite": SUITE_MATHER,
        "n": n,
        "m0": data.m0,
        "bookkeeping_checked": len(data.bookkeeping),
    }
    return summary, rows


def _suite_diagonal(settings: dict[str, Any]) -> Report:
    n = settings.get("n", 0)
    sample_count = settings.get("sample_count", DEFAULT_SAMPLE_COUNT)
    seed = settings.get("seed", DEFAULT_SEED)
    setup = element_setup(n, sample_count=sample_count, seed=seed, logger=logger)
    rows = [
        to_jsonable(diagonal_trick(setup, m, sample_count, seed, logger))
        for m in range(settings.get("m_max", DIAGONAL_DEFAULT_M_MAX) + 1)
    ]
    return {"suite": SUITE_DIAGONAL, "n": n}, rows


def _suite_certificate(settings: dict[str, Any]) -> Report:
    n = settings.get("n", 0)
    setup = element_setup(n, logger=logger)
    report = certificate_undistorted(
        setup.f1, n, settings.get("k_max", CERTIFICATE_K_MAX), setup.layout, logger
    )
    summary = {
        "suite": SUITE_CERTIFICATE,
        "n": n,
        "base": report.base,
        "stable_length": report.stable_length,
    }
    return summary, [to_jsonable(row) for row in report.rows]


def _suite_pipeline(settings: dict[str, Any]) -> Report:
    n = settings.get("n", 0)
    report = distortion_report(
        n,
        ratio_m_max=settings.get("m_max", DEFAULT_RATIO_M_MAX),
        verify_m_max=settings.get("verify_m_max", DEFAULT_VERIFY_M_MAX),
        sample_count=settings.get("sample_count", DEFAULT_SAMPLE_COUNT),
        seed=settings.get("seed", DEFAULT_SEED),
        logger=logger,
    )
    lipschitz = bilipschitz_report(
        element_setup(n), settings.get("k_max", BILIPSCHITZ_K_MAX)
    )
    summary = {
        "suite": SUITE_PIPELINE,
        "n": n,
        "m0": report.m0,
        "certificate_base": report.certificate.base,
        "verified": report.verified,
        "lipschitz": lipschitz,
    }
    return summary, [to_jsonable(row) for row in report.ratios]


_SUITES = {
    SUITE_H5: _suite_h5,
    SUITE_BS: _suite_bs,
    SUITE_MATHER: _suite_mather,
    SUITE_DIAGONAL: _suite_diagonal,
    SUITE_CERTIFICATE: _suite_certificate,
    SUITE_PIPELINE: _suite_pipeline,
}


# Commands


@tracer.capture_method
def cmd_verify(settings: dict[str, Any]) -> Report:
    """Run one verification suite.

    Returns:
        Report: The suite summary and its table.

    Raises:
        ConfigError: If no suite is selected.

    """
    suite = settings.get("suite")
    if suite not in _SUITES:
        error_message = f"Unknown suite: {suite}"
        raise ConfigError(error_message)
    logger.info("Verification starts", extra={"suite": suite})
    return _SUITES[suite](settings)


@tracer.capture_method
def cmd_distortion(settings: dict[str, Any]) -> Report:
    """Tabulate n ↦ D_{S,f}(n) for an element of a built-in group.

    Returns:
        Report: The group and element with the table.

    """
    group = settings.get("group", GROUP_BS)
    element = settings.get("element", "f")
    radius = settings.get("radius", DEFAULT_BALL_RADIUS)
    table = distortion_table(
        resolve_element(group, element),
        builtin_group(group),
        radius,
        settings.get("budget", DEFAULT_BFS_BUDGET),
        logger=logger,
    )
    summary = {
        "group": group,
        "element": element,
        "radius": radius,
        "growth_exponent": growth_exponent(table),
    }
    return summary, [{"n": n, "distortion": d} for n, d in table]


@tracer.capture_method
def cmd_ball(settings: dict[str, Any]) -> Report:
    """Sphere sizes of a Cayley ball.

    Returns:
        Report: The ball size with the sphere sizes by radius.

    """
    group = settings.get("group", GROUP_BS)
    ball = bfs_ball(
        builtin_group(group),
        settings.get("radius", DEFAULT_BALL_RADIUS),
        settings.get("budget", DEFAULT_BFS_BUDGET),
        THREADS,
        logger,
    )
    rows: list[dict[str, Any]] = []
    total = 0
    for radius, size in enumerate(ball.sphere_sizes):
        total += size
        rows.append({"radius": radius, "sphere": size, "ball": total})
    return {"group": group, "size": len(ball)}, rows


def read_rank_input(path: Path) -> SetExpr:
    """Decode a set, a map or a named construction into a set expression.

    Maps and constructions are replaced by their break sets.

    Returns:
        SetExpr: The set whose rank is requested.

    Raises:
        SchemaValidationError: If the document has none of the accepted shapes.
        ParseError: If a set or map document does not decode.

    """
    doc = json.loads(path.read_text(encoding="utf-8"))
    validate(event=doc, schema=RANK_INPUT_SCHEMA)
    if "construction" in doc:
        return breakset(construction_map(doc["construction"], doc["n"]))
    try:
        if "kind" in doc:
            return set_from_json(doc)
        if "families" in doc:
            decoded: Homeo = gpl_from_json({"scaffold": {}, **doc})
        else:
            decoded = pl_from_json(doc)
    except (KeyError, TypeError, ValueError, AttributeError, GplabError) as e:
        error_message = ERROR_PARSE.format(path.name, e)
        raise ParseError(error_message) from e
    return breakset(decoded)


@tracer.capture_method
def cmd_rank(path: Path) -> Report:
    """Cantor–Bendixson rank of a set expression or of a map's break set.

    Returns:
        Report: The rank and the derived cardinalities.

    """
    x = read_rank_input(path)
    result = rank(x)
    cardinalities = derived_cardinalities(x)
    summary = {"rank": result.rank, "final_cardinality": result.final_cardinality}
    rows = [{"level": k, "cardinality": c} for k, c in enumerate(cardinalities)]
    return summary, rows


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the four subcommands.

    Returns:
        argparse.ArgumentParser: The parser.

    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--out", type=Path, help="report path (default: stdout)")
    common.add_argument("--format", choices=[FORMAT_JSON, FORMAT_CSV])
    parser = argparse.ArgumentParser(
        prog=SYSTEM_NAME,
        description="Exact verification of rank-graded PL homeomorphism constructions",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    verify = subparsers.add_parser(COMMAND_VERIFY, parents=[common])
    verify.add_argument("--suite", choices=sorted(_SUITES))
    for flag in ("--n", "--n-max", "--m-max", "--k-max", "--verify-m-max"):
        verify.add_argument(flag, type=int)
    verify.add_argument("--sample-count", type=int)
    verify.add_argument("--seed", type=int)
    groups = [GROUP_H5_GAMMA1, GROUP_H5_GAMMA2, GROUP_H5_FULL, GROUP_BS]
    distortion = subparsers.add_parser(COMMAND_DISTORTION, parents=[common])
    distortion.add_argument("--group", choices=groups)
    distortion.add_argument("--element")
    distortion.add_argument("--radius", type=int)
    distortion.add_argument("--budget", type=int)
    ball = subparsers.add_parser(COMMAND_BALL, parents=[common])
    ball.add_argument("--group", choices=groups)
    ball.add_argument("--radius", type=int)
    ball.add_argument("--budget", type=int)
    rank_parser = subparsers.add_parser(COMMAND_RANK, parents=[common])
    rank_parser.add_argument("input", type=Path, help="set, map or construction file")
    return parser


def run(args: argparse.Namespace) -> int:
    """Dispatch a parsed command and map failures to exit codes.

    Returns:
        int: 0 if every check held, 1 on a failed check, 2 on bad input.

    """
    try:
        settings = load_settings(args)
        match args.command:
            case "verify":
                report = cmd_verify(settings)
            case "distortion":
                report = cmd_distortion(settings)
            case "ball":
                report = cmd_ball(settings)
            case _:
                report = cmd_rank(args.input)
        emit(render(report, settings.get("format", FORMAT_JSON)), args.out)
    except _CONFIG_ERRORS:
        logger.exception("Invalid input")
        return EXIT_CONFIG_ERROR
    except GplabError:
        logger.exception("Check failed")
        return EXIT_ASSERTION_FAILED
    logger.info("Command completed", extra={"command": args.command})
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the gplab command.

    Returns:
        int: The exit code.

    """
    return run(build_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())

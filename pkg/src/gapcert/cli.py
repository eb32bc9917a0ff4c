"""Command-line front-end: ``gapcert {h-eval,certify,oracle,zeros}``.

Every command prints one JSON report on stdout (logs go to stderr) and,
with ``--out``, writes the same report to a file. Configuration comes from
an optional JSON file (``--config``), overridden by flags; the published
coefficient preset fills whatever neither provides.
"""

import argparse
import csv
import json
import math
import sys
import typing as T
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import tabulate

from . import constants, oracle, zeros
from .config_logging import logger
from .exceptions import (
    BracketError,
    MonotonicityError,
    ParamsError,
    ParseError,
    SchemaValidationError,
    ZeroMollifierError,
)
from .functionals import FunctionalParams, compute_h
from .kernels import Polynomial
from .optimize import certify, h_min_grid
from .presets import get_preset
from .utils import dump_json, format_float, parse_coefficients, validate_document

EXIT_OK = 0
EXIT_ORACLE_FAILED = 1
EXIT_CONFIG = 2
EXIT_ZERO_MOLLIFIER = 3
EXIT_BRACKET = 4

COMMANDS = ("h-eval", "certify", "oracle", "zeros")


@dataclass(frozen=True)
class RunConfig:
    """One validated run of a command.

    Constructing it checks the functional parameters, so invalid ``r``,
    ``theta``, ``c``, ``j_max`` or ``quad_order`` fail before any
    computation.
    """

    command: str
    r: int = 2
    M: int = 10
    c: float = 3.033 * math.pi
    c_grid: T.Optional[T.Tuple[float, ...]] = None
    theta: float = 0.5
    P1: T.Tuple[float, ...] = (0.0,)
    P2: T.Tuple[float, ...] = (0.0,)
    bracket_lo: float = 3.0 * math.pi
    bracket_hi: float = 3.3 * math.pi
    tol_c: float = constants.TOL_C
    j_max: int = constants.J_MAX
    quad_order: int = constants.QUAD_ORDER
    zeros_file: T.Optional[str] = None
    table_format: str = "plain"
    variant: str = zeros.DEFAULT_VARIANT.value
    thresholds: T.Tuple[float, ...] = (3.033,)
    bins: int = 20
    suite: str = "all"
    pairs: int = 10
    grid_points: int = constants.GRID_POINTS
    out: T.Optional[str] = None
    seed: int = 0
    preset: T.Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParamsError(f"Unknown command {self.command!r}")
        if self.M < 0:
            raise ParamsError(f"M must be non-negative, got {self.M}")
        self.params()

    def params(self) -> FunctionalParams:
        return FunctionalParams(
            r=self.r,
            theta=self.theta,
            c=self.c,
            j_max=self.j_max,
            quad_order=self.quad_order,
        )

    def polynomials(self) -> T.Tuple[Polynomial, Polynomial]:
        return Polynomial(self.P1), Polynomial(self.P2)

    @classmethod
    def from_dict(cls, document: T.Dict[str, T.Any]) -> "RunConfig":
        """Build a configuration from a run-configuration document.

        Keys the document leaves out are taken from its preset (the default
        preset when none is named), then from the class defaults.

        :raises SchemaValidationError: if the document does not match
            ``run_config.schema.json``.
        :raises ParamsError: if the values violate the functional invariants.
        """
        validate_document(document, "run_config")
        document = dict(document)
        preset = get_preset(document.get("preset", constants.DEFAULT_PRESET))
        if "P1" not in document and "P2" not in document:
            document["P1"], document["P2"] = list(preset.P1), list(preset.P2)
            document.setdefault("r", preset.r)
            document.setdefault("M", preset.M)
            document.setdefault("c", preset.c)
        if "format" in document:
            document["table_format"] = document.pop("format")
        for key in ("P1", "P2", "c_grid", "thresholds"):
            if key in document:
                document[key] = tuple(float(v) for v in document[key])
        return cls(**document)


def _window(text: str) -> float:
    """Parse a window such as ``9.53`` or ``3.033pi``."""
    text = text.strip()
    scale = 1.0
    if text.endswith("pi"):
        text, scale = text[:-2].rstrip("*") or "1", math.pi
    try:
        return float(text) * scale
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid window value {text!r}")


def _float_list(text: str) -> T.List[float]:
    return [_window(item) for item in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--preset", help=f"coefficient preset (default {constants.DEFAULT_PRESET})")
    common.add_argument("--r", type=int, help="divisor-function order of H2")
    common.add_argument("--m", dest="M", type=int, help="degree bound of P1 and P2")
    common.add_argument("--c", type=_window, help="window half-width, e.g. 3.033pi")
    common.add_argument("--theta", type=float, help="mollifier length exponent")
    common.add_argument("--p1", dest="P1", type=parse_coefficients, help="comma-separated coefficients of P1")
    common.add_argument("--p2", dest="P2", type=parse_coefficients, help="comma-separated coefficients of P2")
    common.add_argument("--j-max", dest="j_max", type=int, help="V3 series truncation")
    common.add_argument("--quad-order", dest="quad_order", type=int, help="Gauss-Legendre order")
    common.add_argument("--out", help="also write the JSON report to this file")
    common.add_argument("--seed", type=int, help="random seed")

    parser = argparse.ArgumentParser(
        prog="gapcert",
        description="Mollified mean-value functionals and large gaps between zeta zeros.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("h-eval", parents=[common], help="evaluate h(c) for one pair")

    cert = subparsers.add_parser("certify", parents=[common], help="certify lambda > c/pi")
    cert.add_argument("--bracket-lo", dest="bracket_lo", type=_window)
    cert.add_argument("--bracket-hi", dest="bracket_hi", type=_window)
    cert.add_argument("--tol-c", dest="tol_c", type=float)
    cert.add_argument("--grid", dest="c_grid", type=_float_list, help="windows of the h_min(c) CSV")
    cert.add_argument("--grid-points", dest="grid_points", type=int, help="0 disables the CSV")

    orc = subparsers.add_parser("oracle", parents=[common], help="run validation oracles")
    orc.add_argument("--suite", choices=oracle.SUITES + ("all",))
    orc.add_argument("--pairs", type=int, help="random polynomial pairs per check")

    zer = subparsers.add_parser("zeros", parents=[common], help="normalized gap statistics")
    zer.add_argument("--zeros-file", dest="zeros_file")
    zer.add_argument("--format", choices=[f.value for f in zeros.TableFormat])
    zer.add_argument("--variant", choices=[v.value for v in zeros.GapVariant])
    zer.add_argument("--thresholds", type=_float_list)
    zer.add_argument("--bins", type=int)
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    document: T.Dict[str, T.Any] = {}
    if args.config:
        with open(args.config, encoding="utf-8") as stream:
            try:
                document = json.load(stream)
            except json.JSONDecodeError as err:
                raise ParamsError(f"Invalid JSON in {args.config}: {err}")
        if not isinstance(document, dict):
            raise ParamsError(f"{args.config} does not hold a JSON object")
    flags = {
        key: value
        for key, value in vars(args).items()
        if key not in ("config", "command") and value is not None
    }
    document.update(flags)
    document["command"] = args.command
    return RunConfig.from_dict(document)


def _secondary_path(config: RunConfig, suffix: str) -> Path:
    if config.out:
        out = Path(config.out)
        return out.with_name(f"{out.stem}{suffix}")
    return constants.RESULTS_BASE_FOLDER / f"{config.command}{suffix}"


def cmd_h_eval(config: RunConfig) -> T.Tuple[T.Dict, int]:
    params = config.params()
    P1, P2 = config.polynomials()
    breakdown = compute_h(P1, P2, params)
    report = {
        "command": "h-eval",
        "params": {
            "r": params.r,
            "theta": params.theta,
            "c": params.c,
            "c_over_pi": params.c / math.pi,
            "j_max": params.j_max,
            "quad_order": params.quad_order,
            "tail_tol": params.tail_tol,
        },
        "P1": P1.tolist(),
        "P2": P2.tolist(),
        "breakdown": breakdown.to_dict(),
    }
    logger.info("h(%.6g pi) = %.9f", params.c / math.pi, breakdown.h)
    return report, EXIT_OK


def cmd_certify(config: RunConfig) -> T.Tuple[T.Dict, int]:
    params = config.params()
    result = certify(
        config.r,
        config.M,
        config.bracket_lo,
        config.bracket_hi,
        tol_c=config.tol_c,
        params=params,
        seed=config.seed,
    )
    grid_csv = None
    if config.c_grid is not None:
        cs = list(config.c_grid)
    elif config.grid_points > 0:
        cs = list(np.linspace(config.bracket_lo, config.bracket_hi, config.grid_points))
    else:
        cs = []
    if cs:
        rows = h_min_grid(params, config.M, cs)
        path = _secondary_path(config, "_grid.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["c", "c_over_pi", "h_min"])
            for c, h in rows:
                writer.writerow([format_float(c), format_float(c / math.pi), format_float(h)])
        grid_csv = str(path)
        logger.info("h_min(c) grid written to %s", path)
    report = {
        "command": "certify",
        "bracket": [config.bracket_lo, config.bracket_hi],
        "seed": config.seed,
        "grid_csv": grid_csv,
        "result": result.to_dict(),
    }
    logger.info("Certified lambda > %.6f", result.lambda_bound)
    return report, EXIT_OK


def cmd_oracle(config: RunConfig) -> T.Tuple[T.Dict, int]:
    checks = oracle.run_suite(
        config.suite, pairs=config.pairs, seed=config.seed, quad_order=config.quad_order
    )
    rows = [[c.name, c.deviation, c.tolerance, "ok" if c.passed else "FAIL"] for c in checks]
    logger.info(
        "Oracle suite %s\n%s",
        config.suite,
        tabulate.tabulate(
            rows, headers=["check", "deviation", "tolerance", ""], floatfmt=".3e"
        ),
    )
    passed = all(c.passed for c in checks)
    report = {
        "command": "oracle",
        "suite": config.suite,
        "seed": config.seed,
        "pairs": config.pairs,
        "passed": passed,
        "checks": [c.to_dict() for c in checks],
    }
    return report, EXIT_OK if passed else EXIT_ORACLE_FAILED


def cmd_zeros(config: RunConfig) -> T.Tuple[T.Dict, int]:
    if config.zeros_file is None:
        raise ParamsError("The zeros command needs --zeros-file")
    variant = zeros.convert_str_to_gap_variant(config.variant)
    table = zeros.load(config.zeros_file, config.table_format)
    records = zeros.normalized_gaps(table, variant)
    summary = zeros.gap_stats(records, config.thresholds, bins=config.bins, variant=variant)
    path = _secondary_path(config, "_gaps.csv")
    zeros.write_gaps_csv(records, path)
    logger.info("Gap records written to %s", path)
    return summary.to_dict(), EXIT_OK


_HANDLERS = {
    "h-eval": (cmd_h_eval, "h_eval"),
    "certify": (cmd_certify, "certify"),
    "oracle": (cmd_oracle, "oracle"),
    "zeros": (cmd_zeros, "zeros_summary"),
}


def run(config: RunConfig) -> int:
    handler, schema_name = _HANDLERS[config.command]
    report, code = handler(config)
    text = dump_json(report, Path(config.out) if config.out else None, schema_name)
    sys.stdout.write(text)
    return code


def main(argv: T.Optional[T.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(build_config(args))
    except (ParamsError, SchemaValidationError, ParseError, MonotonicityError, OSError) as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    except ZeroMollifierError as err:
        logger.error("%s", err)
        return EXIT_ZERO_MOLLIFIER
    except BracketError as err:
        logger.error("%s", err)
        return EXIT_BRACKET


if __name__ == "__main__":
    sys.exit(main())

"""Ingestion of zeta-zero ordinate tables and normalized gap statistics.

Zeros are never computed here; tables come from published files in one of
two formats:

* ``plain``: one decimal ordinate per line,
* ``offset``: a base value on the first line, then one offset per line,
  each added to the base (the layout of the high-height tables).

Blank lines and ``#`` comments are ignored in both.
"""

import csv
import math
import typing as T
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import tabulate

from . import constants
from .config_logging import logger
from .exceptions import MonotonicityError, ParamsError, ParseError
from .utils import dump_json, format_float


def convert_str_to_gap_variant(variant: str):
    return next((v for v in GapVariant if v.value == variant), None)


def convert_str_to_table_format(fmt: str):
    return next((f for f in TableFormat if f.value == fmt), None)


class GapVariant(Enum):
    PAPER_LOG_GAMMA = "paper_log_gamma"
    LOG_GAMMA_OVER_2PI = "log_gamma_over_2pi"


class TableFormat(Enum):
    PLAIN = "plain"
    OFFSET = "offset"


DEFAULT_VARIANT = GapVariant.LOG_GAMMA_OVER_2PI

_MEAN_NOTES = {
    GapVariant.LOG_GAMMA_OVER_2PI: "mean spacing tends to 1 as gamma grows",
    GapVariant.PAPER_LOG_GAMMA: (
        "mean spacing tends to 1 + log(2 pi) / log(gamma/2pi), so above 1 at "
        "every finite height"
    ),
}


@dataclass(frozen=True, eq=False)
class ZeroTable:
    """Strictly increasing positive zero ordinates with their source."""

    ordinates: np.ndarray
    path: T.Optional[str] = None

    def __post_init__(self):
        ordinates = np.array(self.ordinates, dtype=float).reshape(-1)
        _check_increasing(ordinates)
        ordinates.setflags(write=False)
        object.__setattr__(self, "ordinates", ordinates)

    def __len__(self) -> int:
        return self.ordinates.size

    @property
    def count(self) -> int:
        return self.ordinates.size

    @property
    def range(self) -> T.Optional[T.Tuple[float, float]]:
        if not self.count:
            return None
        return float(self.ordinates[0]), float(self.ordinates[-1])

    def subtable(self, start: int, stop: T.Optional[int] = None) -> "ZeroTable":
        return ZeroTable(self.ordinates[start:stop], path=self.path)


@dataclass(frozen=True)
class GapRecord:
    gamma: float
    gamma_next: float
    delta: float
    variant: GapVariant


@dataclass(frozen=True)
class GapSummary:
    variant: GapVariant
    count: int
    max_delta: T.Optional[float]
    min_delta: T.Optional[float]
    mean_delta: T.Optional[float]
    gamma_at_max: T.Optional[float]
    exceedances: T.Dict[float, int]
    histogram_counts: T.List[int]
    histogram_edges: T.List[float]
    mean_note: str = field(default="")

    def to_dict(self) -> T.Dict[str, T.Any]:
        return {
            "variant": self.variant.value,
            "count": self.count,
            "max_delta": self.max_delta,
            "min_delta": self.min_delta,
            "mean_delta": self.mean_delta,
            "gamma_at_max": self.gamma_at_max,
            "exceedances": [
                {"threshold": threshold, "count": count}
                for threshold, count in self.exceedances.items()
            ],
            "histogram": {
                "counts": self.histogram_counts,
                "edges": self.histogram_edges,
            },
            "mean_note": self.mean_note,
        }


def _check_increasing(ordinates: np.ndarray):
    if ordinates.size and not ordinates[0] > 0.0:
        raise MonotonicityError(0, float(ordinates[0]), None)
    steps = np.diff(ordinates)
    bad = np.flatnonzero(~(steps > 0.0))
    if bad.size:
        index = int(bad[0]) + 1
        raise MonotonicityError(index, float(ordinates[index]), float(ordinates[index - 1]))


def _parse_lines(lines: T.Iterable[str], path: T.Optional[str]) -> T.List[float]:
    values = []
    for line_number, line in enumerate(lines, start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        try:
            value = float(content)
        except ValueError:
            raise ParseError(line_number, line.rstrip("\n"), path)
        if not math.isfinite(value):
            raise ParseError(line_number, line.rstrip("\n"), path)
        values.append(value)
    return values


def load(path: T.Union[str, Path], fmt: T.Union[str, TableFormat] = TableFormat.PLAIN) -> ZeroTable:
    """Load and validate a table of zero ordinates.

    :param path: the table file, ASCII
    :type path: str or Path
    :param fmt: ``"plain"`` or ``"offset"``
    :type fmt: str or TableFormat

    :return: the validated table
    :rtype: ZeroTable

    :raises ParseError: on a line that is not a finite decimal number.
    :raises MonotonicityError: if the ordinates are not positive and
        strictly increasing.
    """
    table_format = fmt if isinstance(fmt, TableFormat) else convert_str_to_table_format(fmt)
    if table_format is None:
        raise ParamsError(f"Unknown zero table format {fmt!r}")
    path = Path(path)
    with open(path, encoding="ascii") as stream:
        values = _parse_lines(stream, str(path))
    if table_format is TableFormat.OFFSET and values:
        base, offsets = values[0], values[1:]
        values = [base + offset for offset in offsets]
    table = ZeroTable(np.array(values), path=str(path))
    logger.info("Loaded %d zero ordinates from %s", table.count, path)
    return table


def save(table: ZeroTable, path: T.Union[str, Path]):
    """Write a table in the plain format.

    Each ordinate is written with its shortest round-trip representation,
    so ``load(save(table))`` returns identical doubles.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii") as stream:
        for value in table.ordinates:
            stream.write(f"{float(value)!r}\n")


def gap_deltas(
    table: ZeroTable, variant: GapVariant = DEFAULT_VARIANT
) -> np.ndarray:
    """Normalized gaps of consecutive ordinates as an array.

    :raises ParamsError: if the table has fewer than two ordinates, or the
        normalization factor of the variant is not positive on it.
    """
    if table.count < 2:
        raise ParamsError(f"Need at least two ordinates, got {table.count}")
    gamma = table.ordinates[:-1]
    gaps = np.diff(table.ordinates)
    if variant is GapVariant.PAPER_LOG_GAMMA:
        scale = np.log(gamma)
    else:
        scale = np.log(gamma / constants.TWO_PI)
    if np.any(scale <= 0.0):
        first = float(gamma[np.argmax(scale <= 0.0)])
        raise ParamsError(
            f"The {variant.value} normalization is not positive at gamma = {first!r}"
        )
    return gaps * scale / constants.TWO_PI


def normalized_gaps(
    table: ZeroTable, variant: GapVariant = DEFAULT_VARIANT
) -> T.List[GapRecord]:
    """``delta(gamma) = (gamma' - gamma) log(gamma) / 2pi`` for the
    ``paper_log_gamma`` variant, ``log(gamma / 2pi)`` in place of
    ``log(gamma)`` for ``log_gamma_over_2pi``."""
    deltas = gap_deltas(table, variant)
    return [
        GapRecord(float(gamma), float(gamma_next), float(delta), variant)
        for gamma, gamma_next, delta in zip(
            table.ordinates[:-1], table.ordinates[1:], deltas
        )
    ]


def gap_stats(
    records: T.Sequence[GapRecord],
    thresholds: T.Sequence[float] = (),
    bins: int = 20,
    variant: T.Optional[GapVariant] = None,
) -> GapSummary:
    """Extreme and average normalized gaps, threshold counts and a histogram.

    :param records: the gap records, all of one variant
    :param thresholds: report how many ``delta`` exceed each of these
    :param bins: histogram bin count
    """
    if variant is None:
        variant = records[0].variant if records else DEFAULT_VARIANT
    deltas = np.array([record.delta for record in records], dtype=float)
    exceedances = {float(t): int(np.count_nonzero(deltas > t)) for t in thresholds}
    if not deltas.size:
        return GapSummary(
            variant=variant,
            count=0,
            max_delta=None,
            min_delta=None,
            mean_delta=None,
            gamma_at_max=None,
            exceedances=exceedances,
            histogram_counts=[],
            histogram_edges=[],
            mean_note=_MEAN_NOTES[variant],
        )

    counts, edges = np.histogram(deltas, bins=bins)
    at_max = int(np.argmax(deltas))
    summary = GapSummary(
        variant=variant,
        count=int(deltas.size),
        max_delta=float(deltas[at_max]),
        min_delta=float(deltas.min()),
        mean_delta=math.fsum(deltas) / deltas.size,
        gamma_at_max=records[at_max].gamma,
        exceedances=exceedances,
        histogram_counts=[int(c) for c in counts],
        histogram_edges=[float(e) for e in edges],
        mean_note=_MEAN_NOTES[variant],
    )
    rows = [
        ["gaps", summary.count],
        ["max delta", summary.max_delta],
        ["at gamma", summary.gamma_at_max],
        ["min delta", summary.min_delta],
        ["mean delta", summary.mean_delta],
    ]
    rows += [[f"delta > {t:g}", n] for t, n in exceedances.items()]
    logger.info(
        "Normalized gaps (%s)\n%s",
        variant.value,
        tabulate.tabulate(rows, tablefmt="simple", floatfmt=".9g"),
    )
    return summary


def write_gaps_csv(records: T.Sequence[GapRecord], path: T.Union[str, Path]):
    """Write ``gamma,gamma_next,delta`` rows with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["gamma", "gamma_next", "delta"])
        for record in records:
            writer.writerow(
                [format_float(record.gamma), format_float(record.gamma_next), format_float(record.delta)]
            )


def write_summary_json(summary: GapSummary, path: T.Union[str, Path]) -> str:
    return dump_json(summary.to_dict(), Path(path), schema_name="zeros_summary")

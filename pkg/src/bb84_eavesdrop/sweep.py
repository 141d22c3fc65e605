"""Parameter sweeps and feasibility maps over the closed-form model."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .analytic import DegenerateModelError, full_report
from .core import ParameterError, SystemParams
from .strategy import DirectAttackTable, build_default_table, load_table

__all__ = [
    "PARAM_NAMES",
    "MODE_MATCHED",
    "MODE_ERROR_ONLY",
    "CLASS_BOTH",
    "CLASS_PB",
    "CLASS_PM",
    "CLASS_DEGENERATE",
    "DEFAULT_M",
    "SweepAxis",
    "SweepSpec",
    "CurvePoint",
    "run_sweep",
    "classify_feasibility",
    "write_csv",
    "parse_csv",
]

PARAM_NAMES = ("mu", "alpha", "eta", "r_c")
MODE_MATCHED = "matched"
MODE_ERROR_ONLY = "error-only"
_MODES = (MODE_MATCHED, MODE_ERROR_ONLY)
DEFAULT_M = 1_000_000

CLASS_BOTH = "both_feasible"
CLASS_PB = "pb_infeasible"
CLASS_PM = "pm_infeasible"
CLASS_DEGENERATE = "degenerate"


@dataclass(frozen=True, slots=True)
class SweepAxis:
    """One swept parameter: name, range, grid size, and spacing."""

    name: str
    start: float
    stop: float
    points: int
    spacing: str = "linear"

    def __post_init__(self) -> None:
        if self.name not in PARAM_NAMES:
            raise ParameterError(f"unknown sweep parameter {self.name!r}; choose from {PARAM_NAMES}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ParameterError("axis bounds must be finite")
        if self.start > self.stop:
            raise ParameterError(f"axis start {self.start} exceeds stop {self.stop}")
        if self.points < 1:
            raise ParameterError(f"axis needs at least one point, got {self.points}")
        if self.spacing not in ("linear", "log"):
            raise ParameterError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and self.start <= 0:
            raise ParameterError("log spacing needs start > 0")

    def values(self) -> tuple[float, ...]:
        if self.points == 1:
            return (self.start,)
        if self.spacing == "log":
            grid = np.logspace(math.log10(self.start), math.log10(self.stop), self.points)
        else:
            grid = np.linspace(self.start, self.stop, self.points)
        return tuple(float(v) for v in grid)


@dataclass(frozen=True)
class SweepSpec:
    """Full sweep description: one or two axes, fixed values, modes, table.

    The axes and the ``fixed`` mapping must together cover mu, alpha, eta,
    r_c exactly, with no overlap. ``mode`` is ``matched``, ``error-only``
    or ``both``; ``table_source`` is ``default`` or a strategy-table file
    path.
    """

    axes: tuple[SweepAxis, ...]
    fixed: Mapping[str, float] | Sequence[tuple[str, float]]
    m: int = DEFAULT_M
    mode: str = "both"
    table_source: str = "default"

    def __post_init__(self) -> None:
        object.__setattr__(self, "axes", tuple(self.axes))
        fixed_pairs = tuple(sorted(dict(self.fixed).items()))
        object.__setattr__(self, "fixed", fixed_pairs)
        if not 1 <= len(self.axes) <= 2:
            raise ParameterError(f"sweeps use one or two axes, got {len(self.axes)}")
        axis_names = {axis.name for axis in self.axes}
        if len(axis_names) != len(self.axes):
            raise ParameterError("axes must sweep distinct parameters")
        fixed_names = {name for name, _ in fixed_pairs}
        if axis_names & fixed_names:
            raise ParameterError(f"parameters {sorted(axis_names & fixed_names)} are both swept and fixed")
        if axis_names | fixed_names != set(PARAM_NAMES):
            raise ParameterError(f"axes plus fixed values must cover {PARAM_NAMES} exactly")
        if self.mode not in _MODES + ("both",):
            raise ParameterError(f"mode must be one of {_MODES + ('both',)}, got {self.mode!r}")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ParameterError(f"m must be an integer >= 1, got {self.m!r}")

    @property
    def modes(self) -> tuple[str, ...]:
        return _MODES if self.mode == "both" else (self.mode,)

    def load_table(self) -> DirectAttackTable:
        if self.table_source == "default":
            return build_default_table()
        return load_table(self.table_source)


@dataclass(frozen=True, slots=True)
class CurvePoint:
    """One sweep row: swept values, attack mode, and the report scalars.

    Degenerate rows (solver denominators underflowed) carry NaNs and the
    flag instead of being dropped, so grids stay rectangular.
    """

    values: tuple[float, ...]
    mode: str
    eve_info: float
    p_block: float
    p_measure: float
    feasible_block: bool
    feasible_measure: bool
    sifted: float
    errors: float
    degenerate: bool = False

    @property
    def feasible(self) -> bool:
        return self.feasible_block and self.feasible_measure and not self.degenerate


def _degenerate_point(values: tuple[float, ...], mode: str) -> CurvePoint:
    nan = math.nan
    return CurvePoint(
        values=values,
        mode=mode,
        eve_info=nan,
        p_block=nan,
        p_measure=nan,
        feasible_block=False,
        feasible_measure=False,
        sifted=nan,
        errors=nan,
        degenerate=True,
    )


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[CurvePoint]:
    """Evaluate the closed-form report over the grid.

    Emits one row per grid point per requested mode, in grid order (outer
    axis major) with modes in declaration order inside a point; the order
    does not depend on ``threads``.
    """
    if threads < 1:
        raise ParameterError(f"threads must be >= 1, got {threads}")
    table = spec.load_table()
    fixed = dict(spec.fixed)
    axis_names = tuple(axis.name for axis in spec.axes)
    grid = list(product(*(axis.values() for axis in spec.axes)))

    def evaluate(values: tuple[float, ...]) -> list[CurvePoint]:
        params = SystemParams(m=spec.m, **dict(zip(axis_names, values)), **fixed)
        rows = []
        for mode in spec.modes:
            try:
                report = full_report(params, table, match_count_rate=(mode == MODE_MATCHED))
            except DegenerateModelError:
                rows.append(_degenerate_point(values, mode))
                continue
            rows.append(
                CurvePoint(
                    values=values,
                    mode=mode,
                    eve_info=report.eve_info,
                    p_block=report.plan.p_block,
                    p_measure=report.plan.p_measure,
                    feasible_block=report.plan.feasible_block,
                    feasible_measure=report.plan.feasible_measure,
                    sifted=report.sifted,
                    errors=report.errors,
                )
            )
        return rows

    if threads == 1:
        nested = [evaluate(values) for values in grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            nested = list(pool.map(evaluate, grid))
    return [row for rows in nested for row in rows]


def classify_feasibility(point: CurvePoint) -> str:
    """Sort a row into both_feasible / pb_infeasible / pm_infeasible.

    Blocking-probability violations take precedence when both constraints
    fail, so the three labels partition every non-degenerate row.
    """
    if point.degenerate:
        return CLASS_DEGENERATE
    if not point.feasible_block:
        return CLASS_PB
    if not point.feasible_measure:
        return CLASS_PM
    return CLASS_BOTH


_CSV_FIXED_COLUMNS = (
    "mode",
    "s_partial",
    "p_b",
    "p_m",
    "feasible_pb",
    "feasible_pm",
    "n",
    "e_T",
    "degenerate",
)
_BOOL_COLUMNS = frozenset({"feasible_pb", "feasible_pm", "degenerate"})
_TEXT_COLUMNS = frozenset({"mode", "class"})


def _format_cell(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(spec: SweepSpec, points: Iterable[CurvePoint], with_class: bool = False) -> str:
    """Render sweep rows as CSV text.

    Columns: one per swept axis, then mode, s_partial, p_b, p_m,
    feasible_pb, feasible_pm, n, e_T, degenerate, and (for feasibility
    maps) class. Floats carry 17 significant digits so the text round-trips
    to the exact binary values.
    """
    header = [axis.name for axis in spec.axes] + list(_CSV_FIXED_COLUMNS)
    if with_class:
        header.append("class")
    lines = [",".join(header)]
    for point in points:
        row = [_format_cell(v) for v in point.values]
        row += [
            point.mode,
            _format_cell(point.eve_info),
            _format_cell(point.p_block),
            _format_cell(point.p_measure),
            _format_cell(point.feasible_block),
            _format_cell(point.feasible_measure),
            _format_cell(point.sifted),
            _format_cell(point.errors),
            _format_cell(point.degenerate),
        ]
        if with_class:
            row.append(classify_feasibility(point))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[dict[str, float | bool | str]]:
    """Parse ``write_csv`` output back into one dict per row."""
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise ParameterError("empty CSV text")
    header = lines[0].split(",")
    rows: list[dict[str, float | bool | str]] = []
    for line in lines[1:]:
        row: dict[str, float | bool | str] = {}
        for name, cell in zip(header, line.split(",")):
            if name in _TEXT_COLUMNS:
                row[name] = cell
            elif name in _BOOL_COLUMNS:
                row[name] = cell == "true"
            else:
                row[name] = float(cell)
        rows.append(row)
    return rows

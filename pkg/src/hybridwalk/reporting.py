"""Delimited-text emission of sweep results.

Every emitter is a pure function of its inputs and returns a string that
is byte-identical across re-emissions: comma-separated, header row,
LF line endings, no timestamps.  Float columns appear twice — at full
precision (``repr``, round-trips exactly) and as a rounded display
value in the style of the summary table.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import strategies
from .errors import IncompleteGridError
from .experiment import FixedLengthPoint, SummaryStats
from .gridworld import GridworldSpec
from .pinit import FirstRewardModel, SuccessCurve
from .strategies import canonical_strategy

# Row order within one wall distance: doubling strategies first, the
# free walk after, fixed-length variants last.
STRATEGY_ORDER = (
    strategies.PROBABILISTIC_HYBRID,
    strategies.PROBABILISTIC_CLASSICAL,
    strategies.UNRESTRICTED_CLASSICAL,
    strategies.FIXED_HYBRID,
    strategies.FIXED_CLASSICAL,
)

TABLE_HEADER = (
    "d_wall",
    "strategy",
    "b",
    "mean_n_act",
    "std_error",
    "is_min",
    "mean_display",
    "std_error_display",
)
HISTOGRAM_HEADER = ("bin", "frequency", "frequency_display")
CURVE_HEADER = ("L", "value", "error", "method")
FREQUENCY_TOLERANCE = 1e-9


def _full(value: float) -> str:
    return repr(float(value))


def _display(value: float) -> str:
    return f"{float(value):.0f}"


def _strategy_rank(strategy: str) -> int:
    name = canonical_strategy(strategy)
    return STRATEGY_ORDER.index(name)


@dataclass(frozen=True)
class TableRow:
    """One strategy/layout cell of the summary table."""

    d_wall: int
    strategy: str
    base_size: int
    mean_n_act: float
    std_error: float
    is_min: bool


@dataclass(frozen=True)
class TableArtifact:
    """Complete summary table with exactly one minimum flag per
    (d_wall, base size) column group."""

    rows: tuple[TableRow, ...]

    @classmethod
    def from_stats(cls, stats: Iterable[SummaryStats]) -> "TableArtifact":
        cells: dict[tuple[int, str, int], SummaryStats] = {}
        for s in stats:
            if s.fixed_L is not None:
                raise ValueError(
                    "fixed-length results belong in a curve artifact, not the table"
                )
            key = (s.wall_distance, canonical_strategy(s.strategy), s.base_size)
            if key in cells:
                raise ValueError(f"duplicate cell {key}")
            cells[key] = s
        if not cells:
            raise ValueError("no cells to tabulate")
        d_walls = sorted({d for d, _, _ in cells})
        names = sorted({s for _, s, _ in cells}, key=_strategy_rank)
        bases = sorted({b for _, _, b in cells})
        missing = [
            (d, s, b)
            for d in d_walls
            for s in names
            for b in bases
            if (d, s, b) not in cells
        ]
        if missing:
            raise IncompleteGridError(missing)

        def group_min(d: int, b: int) -> str:
            # NaN means (all-error cells) sort last so the flag stays unique.
            return min(
                names,
                key=lambda s: (
                    math.isnan(cells[(d, s, b)].mean_n_act),
                    cells[(d, s, b)].mean_n_act,
                    _strategy_rank(s),
                ),
            )

        minima = {(d, b): group_min(d, b) for d in d_walls for b in bases}
        rows = tuple(
            TableRow(
                d_wall=d,
                strategy=s,
                base_size=b,
                mean_n_act=cells[(d, s, b)].mean_n_act,
                std_error=cells[(d, s, b)].std_error,
                is_min=minima[(d, b)] == s,
            )
            for d in d_walls
            for s in names
            for b in bases
        )
        return cls(rows)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for r in self.rows:
            writer.writerow(
                (
                    r.d_wall,
                    r.strategy,
                    r.base_size,
                    _full(r.mean_n_act),
                    _full(r.std_error),
                    "true" if r.is_min else "false",
                    _display(r.mean_n_act),
                    _display(r.std_error),
                )
            )
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TableArtifact":
        reader = csv.reader(io.StringIO(text))
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ValueError("empty table") from None
        if header != TABLE_HEADER:
            raise ValueError(f"unexpected table header {header!r}")
        rows = []
        for record in reader:
            if len(record) != len(TABLE_HEADER):
                raise ValueError(f"malformed table row {record!r}")
            d, s, b, mean, se, is_min, _, _ = record
            if is_min not in ("true", "false"):
                raise ValueError(f"malformed is_min flag {is_min!r}")
            rows.append(
                TableRow(
                    d_wall=int(d),
                    strategy=s,
                    base_size=int(b),
                    mean_n_act=float(mean),
                    std_error=float(se),
                    is_min=is_min == "true",
                )
            )
        artifact = cls(tuple(rows))
        flags = {}
        for r in artifact.rows:
            flags[(r.d_wall, r.base_size)] = flags.get((r.d_wall, r.base_size), 0) + r.is_min
        if any(count != 1 for count in flags.values()):
            raise ValueError("expected exactly one minimum flag per (d_wall, b) group")
        return artifact


def emit_table(stats: Iterable[SummaryStats]) -> str:
    """Summary table over a complete (d_wall × strategy × b) grid."""
    return TableArtifact.from_stats(stats).to_csv()


def parse_table(text: str) -> TableArtifact:
    """Inverse of emit_table for the full-precision columns."""
    return TableArtifact.from_csv(text)


def emit_histogram(
    stats: Iterable[SummaryStats], cell: tuple[str, int, int]
) -> str:
    """Relative terminal-length frequencies for one (strategy, b, d_wall).

    Bins follow the experiment module's rule: exact power-of-2 lengths
    for the episode-based strategies, [2^j, 2^(j+1)) lower edges for the
    unrestricted walk.
    """
    name, base_size, d_wall = canonical_strategy(cell[0]), int(cell[1]), int(cell[2])
    matches = [
        s
        for s in stats
        if canonical_strategy(s.strategy) == name
        and s.base_size == base_size
        and s.wall_distance == d_wall
    ]
    if not matches:
        raise ValueError(f"no cell ({name!r}, b={base_size}, d_wall={d_wall}) in stats")
    if len(matches) > 1:
        raise ValueError(
            f"cell ({name!r}, b={base_size}, d_wall={d_wall}) is ambiguous: "
            f"{len(matches)} entries"
        )
    hist = matches[0].terminal_L_histogram
    total = sum(hist.values())
    if abs(total - 1.0) > FREQUENCY_TOLERANCE:
        raise ValueError(f"frequencies sum to {total!r}, expected 1")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HISTOGRAM_HEADER)
    for edge in sorted(hist):
        writer.writerow((edge, _full(hist[edge]), f"{hist[edge]:.4f}"))
    return out.getvalue()


def _curve_series(curve: SuccessCurve) -> tuple[str, str, GridworldSpec, list[tuple]]:
    methods = {curve.points[L].method for L in curve.lengths}
    overall = methods.pop() if len(methods) == 1 else "mixed"
    rows = []
    for L in curve.lengths:
        pt = curve.points[L]
        if pt.n_shots > 0:
            err = math.sqrt(pt.estimate * (1.0 - pt.estimate) / pt.n_shots)
        else:
            err = 0.0
        rows.append((pt.L, pt.estimate, err, pt.method))
    return "p_init", overall, curve.spec, rows


def emit_curve(
    series: SuccessCurve | FirstRewardModel | Sequence[FixedLengthPoint],
    *,
    spec: GridworldSpec | None = None,
    strategy: str | None = None,
) -> str:
    """Plot-ready (L, value, error, method) series.

    Accepts a success curve (value = p_init; per-point method column
    flags interpolated entries) or fixed-length sweep results (value =
    mean n_act; requires ``spec`` and ``strategy`` for the header line).
    """
    if isinstance(series, FirstRewardModel):
        series = series.curve
    if isinstance(series, SuccessCurve):
        name, method, spec, rows = _curve_series(series)
        header = f"# series={name} b={spec.base_size} d_wall={spec.wall_distance} method={method}"
    else:
        if spec is None or strategy is None:
            raise ValueError("fixed-length series need spec= and strategy=")
        name = canonical_strategy(strategy)
        if name not in strategies.FIXED_STRATEGIES:
            raise ValueError(f"not a fixed-length strategy: {strategy!r}")
        points = sorted(series, key=lambda p: p.L)
        rows = [(p.L, p.mean_n_act, p.std_error, "simulated") for p in points]
        header = (
            f"# series=fixed_length_sweep strategy={name} "
            f"b={spec.base_size} d_wall={spec.wall_distance} method=simulated"
        )
    out = io.StringIO()
    out.write(header + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for L, value, error, method in rows:
        writer.writerow((L, _full(value), _full(error), method))
    return out.getvalue()


def emit_summary(stats: Iterable[SummaryStats]) -> str:
    """JSON document mirroring SummaryStats, for programmatic use."""
    docs = []
    for s in stats:
        docs.append(
            {
                "strategy": s.strategy,
                "base_size": s.base_size,
                "wall_distance": s.wall_distance,
                "mean_n_act": s.mean_n_act,
                "std_error": s.std_error,
                "terminal_L_histogram": {str(k): v for k, v in sorted(s.terminal_L_histogram.items())},
                "n_runs": s.n_runs,
                "n_errors": s.n_errors,
                "fixed_L": s.fixed_L,
            }
        )
    return json.dumps(docs, indent=2, sort_keys=True) + "\n"


def parse_summary(text: str) -> list[SummaryStats]:
    """Inverse of emit_summary."""
    docs = json.loads(text)
    out = []
    for doc in docs:
        out.append(
            SummaryStats(
                strategy=doc["strategy"],
                base_size=int(doc["base_size"]),
                wall_distance=int(doc["wall_distance"]),
                mean_n_act=float(doc["mean_n_act"]),
                std_error=float(doc["std_error"]),
                terminal_L_histogram={
                    int(k): float(v) for k, v in doc["terminal_L_histogram"].items()
                },
                n_runs=int(doc["n_runs"]),
                n_errors=int(doc["n_errors"]),
                fixed_L=None if doc.get("fixed_L") is None else int(doc["fixed_L"]),
            )
        )
    return out


def write_text_file(path, text: str) -> None:
    """UTF-8, LF-only write used by every artifact producer."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)

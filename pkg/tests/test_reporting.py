import math
import random

import numpy as np
import pytest

from hybridwalk.errors import IncompleteGridError
from hybridwalk.experiment import FixedLengthPoint, SummaryStats
from hybridwalk.gridworld import GridworldSpec
from hybridwalk.pinit import (
    METHOD_INTERPOLATED,
    CurvePoint,
    SuccessCurve,
    build_model,
    interpolate_points,
)
from hybridwalk.reporting import (
    TABLE_HEADER,
    TableArtifact,
    emit_curve,
    emit_histogram,
    emit_summary,
    emit_table,
    parse_summary,
    parse_table,
    write_text_file,
)
from hybridwalk.strategies import (
    PROBABILISTIC_CLASSICAL,
    PROBABILISTIC_HYBRID,
    UNRESTRICTED_CLASSICAL,
)


def _stat(strategy, b, d, mean, se=1.5, hist=None, fixed_L=None):
    return SummaryStats(
        strategy=strategy,
        base_size=b,
        wall_distance=d,
        mean_n_act=mean,
        std_error=se,
        terminal_L_histogram=hist if hist is not None else {8: 1.0},
        n_runs=100,
        n_errors=0,
        fixed_L=fixed_L,
    )


def _grid_stats():
    stats = []
    for d in (0, 16):
        for b in (5, 6):
            base = 100.0 * (b + d)
            stats.append(_stat(PROBABILISTIC_HYBRID, b, d, base + 1))
            stats.append(_stat(PROBABILISTIC_CLASSICAL, b, d, base + 2))
            stats.append(_stat(UNRESTRICTED_CLASSICAL, b, d, base + (3 if d else -5)))
    return stats


# --- summary table -----------------------------------------------------------


def test_table_row_order_and_min_flags():
    table = TableArtifact.from_stats(_grid_stats())
    assert [r.d_wall for r in table.rows] == [0] * 6 + [16] * 6
    # Within one d_wall: hybrid rows, then classical, then unrestricted.
    assert [r.strategy for r in table.rows[:6]] == [
        PROBABILISTIC_HYBRID, PROBABILISTIC_HYBRID,
        PROBABILISTIC_CLASSICAL, PROBABILISTIC_CLASSICAL,
        UNRESTRICTED_CLASSICAL, UNRESTRICTED_CLASSICAL,
    ]
    assert [r.base_size for r in table.rows[:6]] == [5, 6, 5, 6, 5, 6]
    mins = {(r.d_wall, r.base_size): r.strategy for r in table.rows if r.is_min}
    assert mins == {
        (0, 5): UNRESTRICTED_CLASSICAL,
        (0, 6): UNRESTRICTED_CLASSICAL,
        (16, 5): PROBABILISTIC_HYBRID,
        (16, 6): PROBABILISTIC_HYBRID,
    }
    for d, b in mins:
        flags = [r.is_min for r in table.rows if (r.d_wall, r.base_size) == (d, b)]
        assert sum(flags) == 1


def test_table_csv_is_order_independent_and_stable():
    stats = _grid_stats()
    shuffled = stats[:]
    random.Random(4).shuffle(shuffled)
    assert emit_table(stats) == emit_table(shuffled)
    assert emit_table(stats) == emit_table(stats)  # byte-identical re-emission
    first_line = emit_table(stats).splitlines()[0]
    assert first_line == ",".join(TABLE_HEADER)


def test_table_round_trip_is_exact():
    stats = _grid_stats()
    stats[0] = _stat(PROBABILISTIC_HYBRID, 5, 0, 123.456789012345678, se=0.1234567)
    table = TableArtifact.from_stats(stats)
    parsed = parse_table(table.to_csv())
    assert parsed.rows == table.rows


def test_table_tie_breaks_on_strategy_order():
    stats = [
        _stat(PROBABILISTIC_HYBRID, 5, 0, 10.0),
        _stat(PROBABILISTIC_CLASSICAL, 5, 0, 10.0),
        _stat(UNRESTRICTED_CLASSICAL, 5, 0, 10.0),
    ]
    (row,) = [r for r in TableArtifact.from_stats(stats).rows if r.is_min]
    assert row.strategy == PROBABILISTIC_HYBRID


def test_table_rejects_bad_inputs():
    stats = _grid_stats()
    with pytest.raises(IncompleteGridError) as err:
        TableArtifact.from_stats(stats[:-1])
    assert "unrestricted_classical" in str(err.value)
    with pytest.raises(ValueError):
        TableArtifact.from_stats(stats + [stats[0]])  # duplicate cell
    with pytest.raises(ValueError):
        TableArtifact.from_stats([_stat(PROBABILISTIC_HYBRID, 5, 0, 10.0, fixed_L=8)])
    with pytest.raises(ValueError):
        TableArtifact.from_stats([])


def test_table_csv_validation():
    text = emit_table(_grid_stats())
    with pytest.raises(ValueError):
        parse_table("a,b\n1,2\n")
    truncated = "\n".join(line.rsplit(",", 1)[0] for line in text.splitlines()) + "\n"
    with pytest.raises(ValueError):
        parse_table(truncated)
    doubled = text.replace("false", "true")
    with pytest.raises(ValueError):
        parse_table(doubled)


def test_table_keeps_nan_cells_but_never_flags_them():
    stats = [
        _stat(PROBABILISTIC_HYBRID, 5, 0, math.nan, se=math.nan),
        _stat(PROBABILISTIC_CLASSICAL, 5, 0, 42.0),
    ]
    rows = TableArtifact.from_stats(stats).rows
    flagged = {r.strategy: r.is_min for r in rows}
    assert flagged == {PROBABILISTIC_HYBRID: False, PROBABILISTIC_CLASSICAL: True}
    parsed = parse_summary(emit_summary(stats))  # NaN survives the JSON trip
    assert math.isnan(parsed[0].mean_n_act)


# --- histograms ----------------------------------------------------------------


def test_histogram_rows_sorted_and_formatted():
    hist = {64: 0.25, 8: 0.5, 16: 0.25}
    stats = [_stat(PROBABILISTIC_HYBRID, 9, 16, 100.0, hist=hist)]
    text = emit_histogram(stats, ("hybrid", 9, 16))
    lines = text.splitlines()
    assert lines[0] == "bin,frequency,frequency_display"
    assert lines[1] == "8,0.5,0.5000"
    assert [line.split(",")[0] for line in lines[1:]] == ["8", "16", "64"]


def test_histogram_requires_a_unique_normalized_cell():
    stats = [_stat(PROBABILISTIC_HYBRID, 9, 16, 100.0, hist={8: 0.9})]
    with pytest.raises(ValueError):
        emit_histogram(stats, ("hybrid", 9, 16))  # mass missing
    with pytest.raises(ValueError):
        emit_histogram(stats, ("hybrid", 9, 64))  # no such cell
    with pytest.raises(ValueError):
        emit_histogram(stats + stats, ("hybrid", 9, 16))  # ambiguous


# --- curves ------------------------------------------------------------------------


def test_curve_emission_flags_interpolation():
    model = build_model(
        GridworldSpec(2, 0), np.random.default_rng(0), method="exact", lengths=[2, 4, 8]
    )
    curve = model.curve
    pts = interpolate_points(curve, [2, 3, 4, 8])
    synthetic = SuccessCurve(curve.spec, pts)
    text = emit_curve(synthetic)
    lines = text.splitlines()
    assert lines[0] == "# series=p_init b=2 d_wall=0 method=mixed"
    assert lines[1] == "L,value,error,method"
    row3 = dict(zip(("L", "value", "error", "method"), lines[3].split(",")))
    assert row3["L"] == "3" and row3["method"] == METHOD_INTERPOLATED
    # Exact DP points carry zero error and round-trip at full precision.
    row2 = lines[2].split(",")
    assert float(row2[1]) == curve.p_init(2) and row2[2] == "0.0"


def test_curve_emission_reports_sampling_error():
    spec = GridworldSpec(2, 0)
    pt = CurvePoint(L=2, estimate=0.125, n_shots=1 << 14, n_success=2048,
                    method="monte_carlo")
    text = emit_curve(SuccessCurve(spec, [pt]))
    err = float(text.splitlines()[2].split(",")[2])
    assert err == pytest.approx(math.sqrt(0.125 * 0.875 / (1 << 14)), abs=1e-15)


def test_fixed_series_emission():
    points = [
        FixedLengthPoint(L=16, mean_n_act=80.0, std_error=2.0, n_runs=50, n_errors=0),
        FixedLengthPoint(L=12, mean_n_act=90.0, std_error=3.0, n_runs=50, n_errors=0),
    ]
    text = emit_curve(points, spec=GridworldSpec(7, 16), strategy="fixed-hybrid")
    lines = text.splitlines()
    assert lines[0] == (
        "# series=fixed_length_sweep strategy=fixed_hybrid b=7 d_wall=16 "
        "method=simulated"
    )
    assert [line.split(",")[0] for line in lines[2:]] == ["12", "16"]  # sorted by L
    with pytest.raises(ValueError):
        emit_curve(points, spec=GridworldSpec(7, 16), strategy="hybrid")
    with pytest.raises(ValueError):
        emit_curve(points)


# --- summaries -----------------------------------------------------------------------


def test_summary_round_trip():
    stats = _grid_stats() + [
        _stat(PROBABILISTIC_HYBRID, 7, 16, 90.0, hist={12: 1.0}, fixed_L=12)
    ]
    assert parse_summary(emit_summary(stats)) == stats
    assert emit_summary(stats) == emit_summary(stats)


def test_write_text_file_uses_lf(tmp_path):
    target = tmp_path / "out.csv"
    write_text_file(target, "a,b\n1,2\n")
    assert target.read_bytes() == b"a,b\n1,2\n"

"""Framework-free request handlers.

Each handler turns one request model into one response model using only
the core package, so the CLI can dispatch in-process and the HTTP layer
stays a thin adapter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .. import reporting
from ..errors import CacheMissError, ConfigError
from ..experiment import (
    ExperimentConfig,
    FixedLengthPoint,
    SummaryStats,
    default_fixed_grid,
    fixed_length_curve,
    run_sweep,
)
from ..gridworld import GridworldSpec
from ..pinit import CurveStore, MIN_SUCCESSES, default_cache_dir
from ..strategies import FIXED_STRATEGIES, canonical_strategy
from ..validate import run_checks
from . import models as m


@dataclass(frozen=True)
class AppState:
    """Server-side settings shared by all handlers."""

    cache_dir: Path
    max_workers: int = 1

    @classmethod
    def create(cls, cache_dir: str | Path | None = None, max_workers: int | None = None) -> "AppState":
        return cls(
            cache_dir=Path(cache_dir) if cache_dir is not None else default_cache_dir(),
            max_workers=max(1, int(max_workers)) if max_workers else 1,
        )


def _cell_slug(strategy: str, b: int, d: int) -> str:
    return f"{canonical_strategy(strategy)}_b{b}_d{d}"


def _curve_filename(spec: GridworldSpec) -> str:
    return f"pinit_b{spec.base_size}_d{spec.wall_distance}.csv"


def handle_pinit(req: m.PinitRequest, state: AppState) -> m.PinitResponse:
    spec = GridworldSpec(req.base_size, req.wall_distance)
    store = CurveStore(state.cache_dir)
    model, was_cached = store.load_or_build(
        spec,
        req.seed_base,
        method=req.method,
        lengths=req.lengths,
        rebuild=req.rebuild,
        max_length=req.max_length,
    )
    capped = [
        pt.L
        for L in model.curve.lengths
        if (pt := model.curve.points[L]).n_shots > 0 and pt.n_success < MIN_SUCCESSES
    ]
    files = [m.FilePayload(name=_curve_filename(spec), content=reporting.emit_curve(model))]
    return m.PinitResponse(
        files=files,
        n_points=len(model.curve.lengths),
        converged_at=model.curve.converged_at,
        was_cached=was_cached,
        capped_lengths=capped,
    )


def _fixed_point_stats(
    strategy: str, spec: GridworldSpec, point: FixedLengthPoint
) -> SummaryStats:
    completed = point.n_runs - point.n_errors
    hist = {point.L: 1.0} if completed else {}
    return SummaryStats(
        strategy=strategy,
        base_size=spec.base_size,
        wall_distance=spec.wall_distance,
        mean_n_act=point.mean_n_act,
        std_error=point.std_error,
        terminal_L_histogram=hist,
        n_runs=point.n_runs,
        n_errors=point.n_errors,
        fixed_L=point.L,
    )


def handle_run(req: m.RunRequest, state: AppState) -> m.RunResponse:
    strategy = canonical_strategy(req.strategy)
    spec = GridworldSpec(req.base_size, req.wall_distance)
    if strategy in FIXED_STRATEGIES:
        if req.fixed_L is None:
            raise ConfigError(f"strategy {strategy} needs fixed_L")
        points = fixed_length_curve(
            spec,
            strategy,
            L_grid=(req.fixed_L,),
            n_runs=req.n_runs,
            seed_base=req.seed_base,
            caps=req.caps.to_core(),
            cache_dir=state.cache_dir,
            curve_method=req.curve_method,
            max_workers=state.max_workers,
        )
        stats = _fixed_point_stats(strategy, spec, points[0])
    else:
        if req.fixed_L is not None:
            raise ConfigError(f"fixed_L only applies to {FIXED_STRATEGIES}")
        config = ExperimentConfig(
            strategies=(strategy,),
            base_sizes=(spec.base_size,),
            wall_distances=(spec.wall_distance,),
            n_runs=req.n_runs,
            seed_base=req.seed_base,
            caps=req.caps.to_core(),
            curve_method=req.curve_method,
        )
        stats = run_sweep(config, cache_dir=state.cache_dir, max_workers=state.max_workers)[0]
    files = [m.FilePayload(name="summary.json", content=reporting.emit_summary([stats]))]
    if stats.n_errors < stats.n_runs:
        files.append(
            m.FilePayload(
                name=f"hist_{_cell_slug(strategy, spec.base_size, spec.wall_distance)}.csv",
                content=reporting.emit_histogram(
                    [stats], (strategy, spec.base_size, spec.wall_distance)
                ),
            )
        )
    return m.RunResponse(files=files, stats=m.SummaryStatsModel.from_core(stats))


def _assert_curves_cached(config: ExperimentConfig, store: CurveStore) -> None:
    from ..strategies import CURVE_STRATEGIES

    if not any(s in CURVE_STRATEGIES for s in config.strategies):
        return
    missing = []
    for b in config.base_sizes:
        for d in config.wall_distances:
            spec = GridworldSpec(b, d)
            try:
                store.load(
                    spec,
                    method=config.curve_method,
                    seed_base=config.seed_base,
                    shot_cap=config.caps.shot_cap,
                )
            except CacheMissError:
                missing.append(f"(b={b}, d_wall={d})")
    if missing:
        raise CacheMissError(
            "no cached success curve for " + ", ".join(missing) + " and building is disabled"
        )


def handle_sweep(req: m.SweepRequest, state: AppState) -> m.SweepResponse:
    config = req.config.to_core()
    store = CurveStore(state.cache_dir)
    if req.no_build:
        _assert_curves_cached(config, store)
    workers = req.max_workers if req.max_workers is not None else state.max_workers
    stats = run_sweep(config, cache_dir=state.cache_dir, max_workers=workers)
    files = [
        m.FilePayload(name="table.csv", content=reporting.emit_table(stats)),
        m.FilePayload(name="summary.json", content=reporting.emit_summary(stats)),
    ]
    for s in stats:
        if s.n_errors == s.n_runs:
            continue
        cell = (s.strategy, s.base_size, s.wall_distance)
        files.append(
            m.FilePayload(
                name=f"hist_{_cell_slug(*cell)}.csv",
                content=reporting.emit_histogram(stats, cell),
            )
        )
    return m.SweepResponse(
        files=files, stats=[m.SummaryStatsModel.from_core(s) for s in stats]
    )


def handle_fixed_sweep(req: m.FixedSweepRequest, state: AppState) -> m.FixedSweepResponse:
    spec = GridworldSpec(req.base_size, req.wall_distance)
    names = [canonical_strategy(s) for s in req.strategies]
    unknown = [s for s in names if s not in FIXED_STRATEGIES]
    if unknown:
        raise ConfigError(f"not fixed-length strategies: {unknown}")
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate strategies in {names}")
    grid = tuple(req.grid) if req.grid is not None else default_fixed_grid(spec)
    files: list[m.FilePayload] = []
    series: dict[str, list[m.FixedPointModel]] = {}
    for name in names:
        points = fixed_length_curve(
            spec,
            name,
            L_grid=grid,
            n_runs=req.n_runs,
            seed_base=req.seed_base,
            caps=req.caps.to_core(),
            cache_dir=state.cache_dir,
            curve_method=req.curve_method,
            max_workers=state.max_workers,
        )
        files.append(
            m.FilePayload(
                name=f"fixed_{_cell_slug(name, spec.base_size, spec.wall_distance)}.csv",
                content=reporting.emit_curve(points, spec=spec, strategy=name),
            )
        )
        series[name] = [
            m.FixedPointModel(
                L=p.L,
                mean_n_act=None if math.isnan(p.mean_n_act) else p.mean_n_act,
                std_error=None if math.isnan(p.std_error) else p.std_error,
                n_runs=p.n_runs,
                n_errors=p.n_errors,
            )
            for p in points
        ]
    return m.FixedSweepResponse(files=files, series=series)


def _parse_summary_document(text: str) -> list:
    try:
        return reporting.parse_summary(text)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"unreadable summary document: {exc}") from exc


def handle_table(req: m.TableRequest) -> m.TableResponse:
    stats = _parse_summary_document(req.summary)
    return m.TableResponse(
        files=[m.FilePayload(name="table.csv", content=reporting.emit_table(stats))]
    )


def handle_hist(req: m.HistRequest) -> m.HistResponse:
    stats = _parse_summary_document(req.summary)
    cell = (req.strategy, req.base_size, req.wall_distance)
    name = f"hist_{_cell_slug(*cell)}.csv"
    try:
        content = reporting.emit_histogram(stats, cell)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return m.HistResponse(files=[m.FilePayload(name=name, content=content)])


def handle_validate(req: m.ValidateRequest, state: AppState) -> m.ValidateResponse:
    checks = run_checks(state.cache_dir if req.use_cache_dir else None)
    return m.ValidateResponse(
        ok=all(c.passed for c in checks),
        checks=[m.CheckModel(name=c.name, passed=c.passed, detail=c.detail) for c in checks],
    )


__all__ = [
    "AppState",
    "handle_pinit",
    "handle_run",
    "handle_sweep",
    "handle_fixed_sweep",
    "handle_table",
    "handle_hist",
    "handle_validate",
]

"""Configuration-driven sweep runner.

A sweep executes ``n_runs`` independently seeded runs for every cell of a
(wall distance × strategy × base size) grid and aggregates each cell into
:class:`SummaryStats`.  Seeds are derived per (cell index, run index) from
a single ``seed_base``, so results are reproducible bit-for-bit and
independent of execution order.  Fixed-episode-length sweeps evaluate the
constant-L strategies over a logarithmic grid of lengths.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from itertools import product
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import pinit, strategies
from ._rng import fixed_generator, run_generator
from .aa import GROWTH_FACTOR, max_bound
from .errors import CapError, ConfigError, CurveLookupError, IncompleteGridError
from .gridworld import GridworldSpec
from .pinit import CurveStore, FirstRewardModel, default_cache_dir
from .strategies import RunRecord, canonical_strategy

DEFAULT_N_RUNS = 10_000
DEFAULT_FIXED_GRID_POINTS = 868
DEFAULT_FIXED_GRID_MAX = 2 ** 14


@dataclass(frozen=True, slots=True)
class Caps:
    """Hard resource limits; exceeding one fails the affected run loudly."""

    shot_cap: int = pinit.DEFAULT_SHOT_CAP
    round_cap: int = strategies.DEFAULT_ROUND_CAP
    step_cap: int = strategies.DEFAULT_STEP_CAP

    def __post_init__(self) -> None:
        for name in ("shot_cap", "round_cap", "step_cap"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")

    def to_mapping(self) -> dict:
        return {
            "shot_cap": self.shot_cap,
            "round_cap": self.round_cap,
            "step_cap": self.step_cap,
        }


@dataclass(frozen=True, slots=True)
class ExperimentConfig:
    """Declarative description of one sweep.

    ``curve_method`` selects how success curves for the hybrid strategies
    are estimated: "auto" (exact DP where affordable, sampling beyond),
    "exact", or "mc".  Sampled curves are seeded from ``seed_base``.
    """

    strategies: tuple[str, ...]
    base_sizes: tuple[int, ...]
    wall_distances: tuple[int, ...]
    n_runs: int = DEFAULT_N_RUNS
    seed_base: int = 0
    fixed_L_grid: tuple[int, ...] | None = None
    caps: Caps = field(default_factory=Caps)
    curve_method: str = "auto"

    def __post_init__(self) -> None:
        if not self.strategies:
            raise ConfigError("strategies must be non-empty")
        object.__setattr__(
            self, "strategies", tuple(canonical_strategy(s) for s in self.strategies)
        )
        if len(set(self.strategies)) != len(self.strategies):
            raise ConfigError(f"duplicate strategies in {self.strategies}")
        object.__setattr__(self, "base_sizes", tuple(int(b) for b in self.base_sizes))
        object.__setattr__(
            self, "wall_distances", tuple(int(d) for d in self.wall_distances)
        )
        if not self.base_sizes or any(b < 2 for b in self.base_sizes):
            raise ConfigError(f"base_sizes must all be >= 2, got {self.base_sizes}")
        if not self.wall_distances or any(d < 0 for d in self.wall_distances):
            raise ConfigError(
                f"wall_distances must all be >= 0, got {self.wall_distances}"
            )
        if self.n_runs < 1:
            raise ConfigError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.seed_base < 0:
            raise ConfigError(f"seed_base must be >= 0, got {self.seed_base}")
        if self.fixed_L_grid is not None:
            grid = tuple(int(L) for L in self.fixed_L_grid)
            if not grid or any(L < 1 for L in grid):
                raise ConfigError("fixed_L_grid must be a non-empty list of L >= 1")
            object.__setattr__(self, "fixed_L_grid", grid)
        if self.curve_method not in ("auto", "exact", "mc"):
            raise ConfigError(
                f"curve_method must be auto, exact or mc, got {self.curve_method!r}"
            )

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(mapping)
        for key in ("strategies", "base_sizes", "wall_distances", "fixed_L_grid"):
            if kwargs.get(key) is not None:
                value = kwargs[key]
                if isinstance(value, (str, int)):
                    value = [value]
                kwargs[key] = tuple(value)
        if "caps" in kwargs and kwargs["caps"] is not None:
            caps = kwargs["caps"]
            if isinstance(caps, Mapping):
                extra = set(caps) - {"shot_cap", "round_cap", "step_cap"}
                if extra:
                    raise ConfigError(f"unknown caps keys: {sorted(extra)}")
                kwargs["caps"] = Caps(**{k: int(v) for k, v in caps.items()})
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_mapping(self) -> dict:
        return {
            "strategies": list(self.strategies),
            "base_sizes": list(self.base_sizes),
            "wall_distances": list(self.wall_distances),
            "n_runs": self.n_runs,
            "seed_base": self.seed_base,
            "fixed_L_grid": None if self.fixed_L_grid is None else list(self.fixed_L_grid),
            "caps": self.caps.to_mapping(),
            "curve_method": self.curve_method,
        }

    def cells(self) -> list[tuple[str, int, int]]:
        """Cell enumeration (strategy, b, d_wall); the position is the
        cell index used for seed derivation."""
        return [
            (s, b, d)
            for d, s, b in product(self.wall_distances, self.strategies, self.base_sizes)
        ]


@dataclass(frozen=True, slots=True)
class SummaryStats:
    """Aggregate of one sweep cell.

    ``n_runs`` counts attempted runs; ``n_errors`` of them hit a cap and
    are excluded from the mean, the standard error and the histogram.
    ``std_error`` is the sample standard deviation over completed runs
    divided by sqrt(completed); NaN when fewer than two runs completed.
    ``terminal_L_histogram`` maps a bin's lower edge to its relative
    frequency among completed runs: exact terminal lengths for the
    episode-based strategies, [2^j, 2^(j+1)) bins for the unrestricted
    walk.
    """

    strategy: str
    base_size: int
    wall_distance: int
    mean_n_act: float
    std_error: float
    terminal_L_histogram: dict[int, float]
    n_runs: int
    n_errors: int
    fixed_L: int | None = None

    @property
    def n_completed(self) -> int:
        return self.n_runs - self.n_errors

    @property
    def spec(self) -> GridworldSpec:
        return GridworldSpec(self.base_size, self.wall_distance)


def bin_terminal_length(strategy: str, terminal_L: int) -> int:
    """Histogram bin (lower edge) for one run's terminal episode length."""
    if canonical_strategy(strategy) == strategies.UNRESTRICTED_CLASSICAL:
        return 1 << (int(terminal_L).bit_length() - 1)
    return int(terminal_L)


def _aggregate(
    strategy: str,
    b: int,
    d: int,
    n_act: np.ndarray,
    terminal: np.ndarray,
    failed: np.ndarray,
    fixed_L: int | None = None,
) -> SummaryStats:
    n_runs = len(n_act)
    ok = ~failed
    done = int(ok.sum())
    if done == 0:
        mean = std_error = math.nan
    else:
        acts = n_act[ok].astype(float)
        mean = float(acts.mean())
        std_error = float(acts.std(ddof=1) / math.sqrt(done)) if done > 1 else math.nan
    hist: dict[int, float] = {}
    if done:
        bins, counts = np.unique(
            [bin_terminal_length(strategy, t) for t in terminal[ok]], return_counts=True
        )
        hist = {int(lo): float(c) / done for lo, c in zip(bins, counts)}
    return SummaryStats(
        strategy=strategy,
        base_size=b,
        wall_distance=d,
        mean_n_act=mean,
        std_error=std_error,
        terminal_L_histogram=hist,
        n_runs=n_runs,
        n_errors=n_runs - done,
        fixed_L=fixed_L,
    )


def _run_chunk(
    runner: Callable[[int, np.random.Generator], RunRecord],
    make_rng: Callable[[int], np.random.Generator],
    lo: int,
    hi: int,
    n_act: np.ndarray,
    terminal: np.ndarray,
    failed: np.ndarray,
    records: list[RunRecord | None] | None,
) -> None:
    # Workers write disjoint index ranges of shared arrays; no locking.
    for i in range(lo, hi):
        try:
            record = runner(i, make_rng(i))
        except CapError:
            failed[i] = True
            continue
        n_act[i] = record.n_act
        terminal[i] = record.terminal_L
        if records is not None:
            records[i] = record


def _run_cell(
    runner: Callable[[int, np.random.Generator], RunRecord],
    make_rng: Callable[[int], np.random.Generator],
    n_runs: int,
    max_workers: int,
    record_sink: Callable[[RunRecord], None] | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n_act = np.zeros(n_runs, dtype=np.int64)
    terminal = np.zeros(n_runs, dtype=np.int64)
    failed = np.zeros(n_runs, dtype=bool)
    records: list[RunRecord | None] | None = [None] * n_runs if record_sink else None
    if max_workers <= 1 or n_runs < 2 * max_workers:
        _run_chunk(runner, make_rng, 0, n_runs, n_act, terminal, failed, records)
    else:
        bounds = np.linspace(0, n_runs, max_workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [
                pool.submit(
                    _run_chunk, runner, make_rng, lo, hi, n_act, terminal, failed, records
                )
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for future in futures:
                future.result()
    if record_sink is not None and records is not None:
        for record in records:
            if record is not None:
                record_sink(record)
    return n_act, terminal, failed


def load_models(
    config: ExperimentConfig,
    cache_dir: str | Path | None = None,
    lengths: Sequence[int] | None = None,
) -> dict[tuple[int, int], FirstRewardModel]:
    """Success-curve models for every layout a curve strategy will visit."""
    needs_curve = [s for s in config.strategies if s in strategies.CURVE_STRATEGIES]
    if not needs_curve:
        return {}
    store = CurveStore(default_cache_dir() if cache_dir is None else cache_dir)
    models: dict[tuple[int, int], FirstRewardModel] = {}
    for b, d in product(config.base_sizes, config.wall_distances):
        model, _ = store.load_or_build(
            GridworldSpec(b, d),
            config.seed_base,
            method=config.curve_method,
            lengths=lengths,
            shot_cap=config.caps.shot_cap,
        )
        models[(b, d)] = model
    return models


def run_sweep(
    config: ExperimentConfig,
    *,
    cache_dir: str | Path | None = None,
    max_workers: int = 1,
    record_sink: Callable[[RunRecord], None] | None = None,
) -> list[SummaryStats]:
    """All cells of the grid, aggregated; deterministic in ``config``.

    Seed derivation: run (cell_index, run_index) draws its generator from
    the stream (seed_base, 0, cell_index, run_index), so distinct runs
    never share a stream and reruns reproduce results bit-for-bit.
    """
    bad = [s for s in config.strategies if s in strategies.FIXED_STRATEGIES]
    if bad:
        raise ConfigError(
            f"constant-length strategies {bad} are swept over L by fixed_length_curve"
        )
    models = load_models(config, cache_dir)
    results: list[SummaryStats] = []
    for cell_index, (strategy, b, d) in enumerate(config.cells()):
        spec = GridworldSpec(b, d)
        model = models.get((b, d))

        def runner(i: int, rng: np.random.Generator, _s=strategy, _spec=spec, _m=model) -> RunRecord:
            return strategies.run_strategy(
                _s,
                _spec,
                rng,
                model=_m,
                step_cap=config.caps.step_cap,
                round_cap=config.caps.round_cap,
                seed=i,
            )

        def make_rng(i: int, _c=cell_index) -> np.random.Generator:
            return run_generator(config.seed_base, _c, i)

        n_act, terminal, failed = _run_cell(
            runner, make_rng, config.n_runs, max_workers, record_sink
        )
        results.append(_aggregate(strategy, b, d, n_act, terminal, failed))
    return results


@dataclass(frozen=True, slots=True)
class FixedLengthPoint:
    """One grid point of a constant-episode-length sweep."""

    L: int
    mean_n_act: float
    std_error: float
    n_runs: int
    n_errors: int


def log_int_grid(lo: int, hi: int, n_points: int) -> tuple[int, ...]:
    """Logarithmically spaced unique integers in [lo, hi], exactly
    ``n_points`` of them when that many fit."""
    if lo < 1 or hi < lo:
        raise ConfigError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    if n_points < 1:
        raise ConfigError(f"n_points must be >= 1, got {n_points}")
    if hi - lo + 1 <= n_points:
        return tuple(range(lo, hi + 1))

    def unique_for(m: int) -> np.ndarray:
        return np.unique(np.rint(np.geomspace(lo, hi, m)).astype(int))

    # len(unique_for) is nondecreasing in m; bisect for an exact hit.
    low, high = n_points, 16 * (hi - lo + 1)
    while low < high:
        mid = (low + high) // 2
        if len(unique_for(mid)) < n_points:
            low = mid + 1
        else:
            high = mid
    grid = unique_for(low)
    if len(grid) > n_points:
        # Exact count unreachable (size jumped past it); thin evenly.
        keep = np.rint(np.linspace(0, len(grid) - 1, n_points)).astype(int)
        grid = grid[keep]
    return tuple(int(L) for L in grid)


def default_fixed_grid(spec: GridworldSpec) -> tuple[int, ...]:
    return log_int_grid(
        spec.min_episode_length, DEFAULT_FIXED_GRID_MAX, DEFAULT_FIXED_GRID_POINTS
    )


def _profile_probability(model: FirstRewardModel, L: int) -> float:
    if L >= len(model.profile):
        raise CurveLookupError(
            f"first-hit profile covers t <= {len(model.profile) - 1}, need L={L}"
        )
    return float(model.profile[: L + 1].sum())


def fixed_classical_expected_cost(model: FirstRewardModel, L: int) -> float:
    """Exact mean total actions of the constant-L classical strategy.

    Episodes are geometric with success probability p = p_init(L): the
    expected count of full failed episodes is (1-p)/p at L steps each,
    plus the conditional hit step of the final successful episode.
    """
    p = _profile_probability(model, L)
    if p <= 0.0:
        return math.inf
    return L * (1.0 - p) / p + model.conditional_mean_hit(L)


def fixed_hybrid_expected_cost(model: FirstRewardModel, L: int) -> float:
    """Exact mean total actions of the constant-L hybrid strategy.

    Follows the amplification schedule round by round: with sampling
    bound B = max(1, floor(m)), the round's success probability averaged
    over k < B is 1/2 - sin(4Bθ)/(4B·sin2θ) with θ = arcsin(√p), its
    amplification cost is (B-1)·L, and m grows by λ after a failure.
    The survival-weighted series is summed until it is numerically zero.
    """
    p = _profile_probability(model, L)
    if p <= 0.0:
        return math.inf
    theta = math.asin(math.sqrt(p))
    e_hit = model.conditional_mean_hit(L)
    m_max = max_bound(L)
    m = 1.0
    survive = 1.0
    total = 0.0
    while survive > 1e-16:
        bound = max(1, math.floor(m))
        if bound == 1:
            q = p
        else:
            q = 0.5 - math.sin(4 * bound * theta) / (4 * bound * math.sin(2 * theta))
        q = min(max(q, 0.0), 1.0)
        total += survive * ((bound - 1) * L + q * e_hit + (1.0 - q) * L)
        survive *= 1.0 - q
        m = min(GROWTH_FACTOR * m, m_max)
    return total


def _mean_amplified(p: float, bound: int) -> float:
    """Mean of sin²((2k+1)·arcsin(√p)) over k uniform below ``bound``."""
    if bound <= 1 or p <= 0.0:
        return p
    if p >= 1.0:
        return 1.0
    theta = math.asin(math.sqrt(p))
    q = 0.5 - math.sin(4 * bound * theta) / (4 * bound * math.sin(2 * theta))
    return min(max(q, 0.0), 1.0)


def _probabilistic_expected_cost(
    model: FirstRewardModel, amplified: bool, tol: float
) -> float:
    """Survival-weighted exact expectation over the (L, m) state chain.

    States are (doubling level, failures at that level); each round first
    applies the doubling draw, then one amplification round (classical
    rounds are the bound-1 special case with no iteration cost).
    """
    horizon = len(model.profile) - 1
    p_of: dict[int, float] = {}
    hit_of: dict[int, float] = {}

    def level_values(L: int) -> tuple[float, float]:
        if L not in p_of:
            capped = min(L, horizon)
            masses = model.profile[: capped + 1]
            total = float(masses.sum())
            if amplified:
                p = model.p_init(L)
            else:
                p = total if L <= horizon else total
            hit = float(np.arange(capped + 1) @ masses / total) if total > 0 else 0.0
            p_of[L], hit_of[L] = p, hit
        return p_of[L], hit_of[L]

    occ: dict[tuple[int, int], float] = {(0, 0): 1.0}
    total_cost = 0.0
    while occ:
        post: dict[tuple[int, int], float] = {}
        for (level, fails), weight in occ.items():
            L = 1 << level
            m = min(GROWTH_FACTOR ** fails, max_bound(L))
            phi = 0.0 if m <= 1.0 else min(
                2.0 * math.log(m) / (L * math.log(4.0)), 1.0
            )
            if m >= max_bound(L):
                phi = 1.0
            if phi > 0.0:
                key = (level + 1, 0)
                post[key] = post.get(key, 0.0) + weight * phi
            if phi < 1.0:
                key = (level, fails)
                post[key] = post.get(key, 0.0) + weight * (1.0 - phi)
        occ = {}
        for (level, fails), weight in post.items():
            L = 1 << level
            p, e_hit = level_values(L)
            if amplified:
                m = min(GROWTH_FACTOR ** fails, max_bound(L))
                bound = max(1, math.floor(m))
                q = _mean_amplified(p, bound)
                aa_cost = float(bound - 1) * L
            else:
                q = p
                aa_cost = 0.0
            total_cost += weight * (aa_cost + q * e_hit + (1.0 - q) * L)
            if (1.0 - q) * weight > tol:
                key = (level, fails + 1)
                occ[key] = occ.get(key, 0.0) + weight * (1.0 - q)
    return total_cost


def probabilistic_hybrid_expected_cost(
    model: FirstRewardModel, *, tol: float = 1e-13
) -> float:
    """Exact mean n_act of the doubling hybrid under the given curve."""
    return _probabilistic_expected_cost(model, True, tol)


def probabilistic_classical_expected_cost(
    model: FirstRewardModel, *, tol: float = 1e-13
) -> float:
    """Exact mean n_act of the doubling classical strategy."""
    return _probabilistic_expected_cost(model, False, tol)


def fixed_length_curve(
    spec: GridworldSpec,
    strategy: str,
    L_grid: Sequence[int] | None = None,
    n_runs: int = DEFAULT_N_RUNS,
    seed_base: int = 0,
    *,
    caps: Caps | None = None,
    model: FirstRewardModel | None = None,
    cache_dir: str | Path | None = None,
    curve_method: str = "auto",
    max_workers: int = 1,
) -> list[FixedLengthPoint]:
    """Per-L Monte-Carlo means for one constant-episode-length strategy.

    Seed derivation: run (strategy, L_index, run_index) draws from the
    stream (seed_base, 2, strategy_index, L_index, run_index).  Lengths
    the target provably cannot be reached within (p_init(L) = 0) are
    reported as fully failed points without simulating their runs, since
    every run would only exhaust its round cap.
    """
    strategy = canonical_strategy(strategy)
    if strategy not in strategies.FIXED_STRATEGIES:
        raise ConfigError(f"not a fixed-length strategy: {strategy}")
    strategy_index = strategies.FIXED_STRATEGIES.index(strategy)
    caps = caps or Caps()
    grid = tuple(sorted({int(L) for L in (L_grid if L_grid is not None else default_fixed_grid(spec))}))
    if not grid or grid[0] < 1:
        raise ConfigError("L grid must contain integers >= 1")
    if model is None:
        store = CurveStore(default_cache_dir() if cache_dir is None else cache_dir)
        model, _ = store.load_or_build(
            spec, seed_base, method=curve_method, lengths=grid, shot_cap=caps.shot_cap
        )
    points: list[FixedLengthPoint] = []
    for L_index, L in enumerate(grid):
        # The exact profile decides reachability; the curve itself is only
        # consulted by the hybrid strategy (which errors on missing L).
        unreachable = L < len(model.profile) and float(model.profile[: L + 1].sum()) == 0.0
        if unreachable:
            points.append(
                FixedLengthPoint(
                    L=L, mean_n_act=math.nan, std_error=math.nan,
                    n_runs=n_runs, n_errors=n_runs,
                )
            )
            continue

        def runner(i: int, rng: np.random.Generator, _L=L) -> RunRecord:
            return strategies.run_strategy(
                strategy, spec, rng, model=model, fixed_L=_L,
                round_cap=caps.round_cap, seed=i,
            )

        def make_rng(i: int, _Li=L_index) -> np.random.Generator:
            return fixed_generator(seed_base, strategy_index, _Li, i)

        n_act, terminal, failed = _run_cell(runner, make_rng, n_runs, max_workers, None)
        stats = _aggregate(strategy, spec.base_size, spec.wall_distance,
                           n_act, terminal, failed, fixed_L=L)
        points.append(
            FixedLengthPoint(
                L=L, mean_n_act=stats.mean_n_act, std_error=stats.std_error,
                n_runs=n_runs, n_errors=stats.n_errors,
            )
        )
    return points


def hybrid_vs_classical_ratio(
    stats: Iterable[SummaryStats],
) -> dict[tuple[int, int], float]:
    """Per-layout savings 1 - mean_hybrid / mean_classical."""
    hybrid: dict[tuple[int, int], float] = {}
    classical: dict[tuple[int, int], float] = {}
    for s in stats:
        key = (s.base_size, s.wall_distance)
        if s.strategy == strategies.PROBABILISTIC_HYBRID:
            hybrid[key] = s.mean_n_act
        elif s.strategy == strategies.PROBABILISTIC_CLASSICAL:
            classical[key] = s.mean_n_act
    keys = set(hybrid) | set(classical)
    if not keys:
        raise IncompleteGridError(["probabilistic_hybrid", "probabilistic_classical"])
    missing = [
        f"{name} at b={b}, d_wall={d}"
        for (b, d) in sorted(keys)
        for name, have in (
            (strategies.PROBABILISTIC_HYBRID, hybrid),
            (strategies.PROBABILISTIC_CLASSICAL, classical),
        )
        if (b, d) not in have
    ]
    if missing:
        raise IncompleteGridError(missing)
    return {key: 1.0 - hybrid[key] / classical[key] for key in sorted(keys)}

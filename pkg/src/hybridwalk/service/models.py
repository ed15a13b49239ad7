"""Request/response schemas for the HTTP service.

Every response that produces artifacts carries them as named
``FilePayload`` entries so clients can write byte-identical files
wherever they choose; structured fields ride alongside for
programmatic use.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..experiment import Caps, ExperimentConfig, SummaryStats


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FilePayload(StrictModel):
    name: str
    content: str


class CapsModel(StrictModel):
    shot_cap: int = Field(default=Caps().shot_cap, ge=1)
    round_cap: int = Field(default=Caps().round_cap, ge=1)
    step_cap: int = Field(default=Caps().step_cap, ge=1)

    def to_core(self) -> Caps:
        return Caps(shot_cap=self.shot_cap, round_cap=self.round_cap, step_cap=self.step_cap)

    @classmethod
    def from_core(cls, caps: Caps) -> "CapsModel":
        return cls(shot_cap=caps.shot_cap, round_cap=caps.round_cap, step_cap=caps.step_cap)


class SummaryStatsModel(StrictModel):
    strategy: str
    base_size: int
    wall_distance: int
    mean_n_act: Optional[float]
    std_error: Optional[float]
    terminal_L_histogram: dict[int, float]
    n_runs: int
    n_errors: int
    fixed_L: Optional[int] = None

    @classmethod
    def from_core(cls, s: SummaryStats) -> "SummaryStatsModel":
        def _json_safe(value: float) -> Optional[float]:
            return None if value != value else value  # NaN -> null

        return cls(
            strategy=s.strategy,
            base_size=s.base_size,
            wall_distance=s.wall_distance,
            mean_n_act=_json_safe(s.mean_n_act),
            std_error=_json_safe(s.std_error),
            terminal_L_histogram=dict(sorted(s.terminal_L_histogram.items())),
            n_runs=s.n_runs,
            n_errors=s.n_errors,
            fixed_L=s.fixed_L,
        )


class ExperimentConfigModel(StrictModel):
    strategies: list[str]
    base_sizes: list[int]
    wall_distances: list[int]
    n_runs: int = 10_000
    seed_base: int = 0
    fixed_L_grid: Optional[list[int]] = None
    caps: CapsModel = CapsModel()
    curve_method: Literal["auto", "exact", "mc"] = "auto"

    def to_core(self) -> ExperimentConfig:
        return ExperimentConfig(
            strategies=tuple(self.strategies),
            base_sizes=tuple(self.base_sizes),
            wall_distances=tuple(self.wall_distances),
            n_runs=self.n_runs,
            seed_base=self.seed_base,
            fixed_L_grid=None if self.fixed_L_grid is None else tuple(self.fixed_L_grid),
            caps=self.caps.to_core(),
            curve_method=self.curve_method,
        )

    @classmethod
    def from_core(cls, config: ExperimentConfig) -> "ExperimentConfigModel":
        return cls(
            strategies=list(config.strategies),
            base_sizes=list(config.base_sizes),
            wall_distances=list(config.wall_distances),
            n_runs=config.n_runs,
            seed_base=config.seed_base,
            fixed_L_grid=None if config.fixed_L_grid is None else list(config.fixed_L_grid),
            caps=CapsModel.from_core(config.caps),
            curve_method=config.curve_method,
        )


class PinitRequest(StrictModel):
    base_size: int = Field(ge=2)
    wall_distance: int = Field(default=0, ge=0)
    method: Literal["auto", "exact", "mc"] = "auto"
    max_length: int = Field(default=1 << 22, ge=1)
    lengths: Optional[list[int]] = None
    seed_base: int = Field(default=0, ge=0)
    rebuild: bool = False


class PinitResponse(StrictModel):
    files: list[FilePayload]
    n_points: int
    converged_at: Optional[int]
    was_cached: bool
    capped_lengths: list[int]


class RunRequest(StrictModel):
    strategy: str
    base_size: int = Field(ge=2)
    wall_distance: int = Field(default=0, ge=0)
    n_runs: int = Field(default=10_000, ge=1)
    seed_base: int = Field(default=0, ge=0)
    fixed_L: Optional[int] = Field(default=None, ge=1)
    caps: CapsModel = CapsModel()
    curve_method: Literal["auto", "exact", "mc"] = "auto"


class RunResponse(StrictModel):
    files: list[FilePayload]
    stats: SummaryStatsModel


class SweepRequest(StrictModel):
    config: ExperimentConfigModel
    no_build: bool = False
    max_workers: Optional[int] = Field(default=None, ge=1)


class SweepResponse(StrictModel):
    files: list[FilePayload]
    stats: list[SummaryStatsModel]


class FixedSweepRequest(StrictModel):
    base_size: int = Field(default=7, ge=2)
    wall_distance: int = Field(default=16, ge=0)
    strategies: list[str] = ["fixed-hybrid", "fixed-classical"]
    grid: Optional[list[int]] = None
    n_runs: int = Field(default=100_000, ge=1)
    seed_base: int = Field(default=0, ge=0)
    caps: CapsModel = CapsModel()
    curve_method: Literal["auto", "exact", "mc"] = "auto"


class FixedPointModel(StrictModel):
    L: int
    mean_n_act: Optional[float]
    std_error: Optional[float]
    n_runs: int
    n_errors: int


class FixedSweepResponse(StrictModel):
    files: list[FilePayload]
    series: dict[str, list[FixedPointModel]]


class TableRequest(StrictModel):
    summary: str  # content of a summary JSON document


class TableResponse(StrictModel):
    files: list[FilePayload]


class HistRequest(StrictModel):
    summary: str
    strategy: str
    base_size: int = Field(ge=2)
    wall_distance: int = Field(default=0, ge=0)


class HistResponse(StrictModel):
    files: list[FilePayload]


class ValidateRequest(StrictModel):
    use_cache_dir: bool = True


class CheckModel(StrictModel):
    name: str
    passed: bool
    detail: str


class ValidateResponse(StrictModel):
    ok: bool
    checks: list[CheckModel]


class HealthResponse(StrictModel):
    status: Literal["ok"]
    version: str

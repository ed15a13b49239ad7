"""Episode-length-doubling search agents on walled gridworlds.

Core pieces: the environment (:mod:`~hybridwalk.gridworld`), exact and
sampled first-reward statistics (:mod:`~hybridwalk.pinit`), amplitude-
amplification emulation (:mod:`~hybridwalk.aa`), the agent strategies
(:mod:`~hybridwalk.strategies`), sweep orchestration
(:mod:`~hybridwalk.experiment`), artifact emission
(:mod:`~hybridwalk.reporting`), self-checks (:mod:`~hybridwalk.validate`)
and an HTTP facade (:mod:`~hybridwalk.service`).
"""

from .aa import BoyerState, amplified_probability, jump_probability, max_bound, sample_k
from .errors import (
    CacheCorruptError,
    CacheError,
    CacheKeyMismatchError,
    CacheMissError,
    CapError,
    ConfigError,
    CurveLookupError,
    HybridwalkError,
    IncompleteGridError,
    RoundCapError,
    SolverError,
    StepCapError,
)
from .experiment import (
    Caps,
    ExperimentConfig,
    FixedLengthPoint,
    SummaryStats,
    default_fixed_grid,
    fixed_length_curve,
    hybrid_vs_classical_ratio,
    load_models,
    log_int_grid,
    run_sweep,
)
from .gridworld import GridworldSpec, pinit_min_closed_form, reward, step
from .pinit import (
    CurvePoint,
    CurveStore,
    FirstRewardModel,
    SuccessCurve,
    build_curve,
    build_model,
    default_cache_dir,
    expected_first_passage,
)
from .strategies import (
    FIXED_CLASSICAL,
    FIXED_HYBRID,
    PROBABILISTIC_CLASSICAL,
    PROBABILISTIC_HYBRID,
    UNRESTRICTED_CLASSICAL,
    RunRecord,
    canonical_strategy,
    run_strategy,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BoyerState",
    "amplified_probability",
    "jump_probability",
    "max_bound",
    "sample_k",
    "HybridwalkError",
    "ConfigError",
    "IncompleteGridError",
    "CapError",
    "RoundCapError",
    "StepCapError",
    "CacheError",
    "CacheMissError",
    "CacheCorruptError",
    "CacheKeyMismatchError",
    "CurveLookupError",
    "SolverError",
    "Caps",
    "ExperimentConfig",
    "FixedLengthPoint",
    "SummaryStats",
    "default_fixed_grid",
    "fixed_length_curve",
    "hybrid_vs_classical_ratio",
    "load_models",
    "log_int_grid",
    "run_sweep",
    "GridworldSpec",
    "pinit_min_closed_form",
    "reward",
    "step",
    "CurvePoint",
    "CurveStore",
    "FirstRewardModel",
    "SuccessCurve",
    "build_curve",
    "build_model",
    "default_cache_dir",
    "expected_first_passage",
    "PROBABILISTIC_HYBRID",
    "PROBABILISTIC_CLASSICAL",
    "UNRESTRICTED_CLASSICAL",
    "FIXED_HYBRID",
    "FIXED_CLASSICAL",
    "RunRecord",
    "canonical_strategy",
    "run_strategy",
]

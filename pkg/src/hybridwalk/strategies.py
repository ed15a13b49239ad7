"""The five first-reward search strategies and their action accounting.

Every run produces a RunRecord whose ``n_act`` counts environment actions:
an amplification round with k iterations at episode length L costs 2·k·L
actions, a failed classical episode costs its full L steps, and the
successful final episode costs only the steps actually taken.

The two probabilistic strategies share the episode-doubling schedule: at
the top of every round the length doubles (resetting the sampling bound)
with probability φ_L(m), which reaches 1 exactly when m saturates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rng import kernel_state
from .aa import BoyerState, amplified_probability, grow_m, sample_k
from .errors import ConfigError, RoundCapError, StepCapError
from .gridworld import GridworldSpec
from .pinit import FirstRewardModel

PROBABILISTIC_HYBRID = "probabilistic_hybrid"
PROBABILISTIC_CLASSICAL = "probabilistic_classical"
UNRESTRICTED_CLASSICAL = "unrestricted_classical"
FIXED_HYBRID = "fixed_hybrid"
FIXED_CLASSICAL = "fixed_classical"

STRATEGIES = (
    PROBABILISTIC_HYBRID,
    PROBABILISTIC_CLASSICAL,
    UNRESTRICTED_CLASSICAL,
    FIXED_HYBRID,
    FIXED_CLASSICAL,
)
PROBABILISTIC_STRATEGIES = (PROBABILISTIC_HYBRID, PROBABILISTIC_CLASSICAL)
FIXED_STRATEGIES = (FIXED_HYBRID, FIXED_CLASSICAL)
CURVE_STRATEGIES = (PROBABILISTIC_HYBRID, FIXED_HYBRID)

_ALIASES = {
    "hybrid": PROBABILISTIC_HYBRID,
    "prob-hybrid": PROBABILISTIC_HYBRID,
    "prob-classical": PROBABILISTIC_CLASSICAL,
    "unrestricted": UNRESTRICTED_CLASSICAL,
    "fixed-hybrid": FIXED_HYBRID,
    "fixed-classical": FIXED_CLASSICAL,
}

DEFAULT_STEP_CAP = 10 ** 9
DEFAULT_ROUND_CAP = 10 ** 6


def canonical_strategy(name: str) -> str:
    """Resolve a strategy name or alias to its canonical identifier."""
    key = name.strip().lower().replace("_", "-")
    canonical = key.replace("-", "_")
    if canonical in STRATEGIES:
        return canonical
    if key in _ALIASES:
        return _ALIASES[key]
    raise ConfigError(
        f"unknown strategy {name!r}; known: {', '.join(STRATEGIES)} "
        f"(aliases: {', '.join(sorted(_ALIASES))})"
    )


@dataclass(frozen=True, slots=True)
class RunRecord:
    """Outcome of a single first-reward run."""

    strategy: str
    spec: GridworldSpec
    n_act: int
    terminal_L: int
    success_step: int
    n_aa_rounds: int
    n_doublings: int
    seed: int

    def __post_init__(self) -> None:
        l_min = self.spec.min_episode_length
        if not l_min <= self.success_step <= self.terminal_L:
            raise ValueError(
                f"success_step {self.success_step} outside [{l_min}, {self.terminal_L}]"
            )
        if self.n_act < self.success_step:
            raise ValueError(f"n_act {self.n_act} below success_step {self.success_step}")
        if self.strategy in PROBABILISTIC_STRATEGIES:
            if self.terminal_L != 1 << self.n_doublings:
                raise ValueError(
                    f"terminal_L {self.terminal_L} != 2^{self.n_doublings} doublings"
                )


def run_probabilistic_hybrid(
    spec: GridworldSpec,
    model: FirstRewardModel,
    rng: np.random.Generator,
    *,
    seed: int = 0,
) -> RunRecord:
    """Amplitude-amplified search with probabilistic episode doubling.

    Per round: maybe double L (resetting m to 1), sample k below m, pay
    2·k·L actions for the amplification, then draw the verification
    outcome against the amplified p_init(L).  Success pays the sampled hit
    step; failure pays L and grows m.
    """
    if model.spec != spec:
        raise ConfigError(f"model built for {model.spec}, run requested for {spec}")
    state = BoyerState(L=1)
    aa_cost = 0
    verify_cost = 0
    n_act = 0
    n_aa_rounds = 0
    n_doublings = 0
    while True:
        if rng.random() < state.jump_probability:
            n_doublings += 1
            state = BoyerState(L=state.L * 2)
        L = state.L
        k = sample_k(state, rng)
        aa_cost += 2 * k * L
        n_act += 2 * k * L
        n_aa_rounds += 1
        boosted = amplified_probability(model.p_init(L), k)
        if rng.random() < boosted:
            t = model.sample_hit_step(L, rng)
            verify_cost += t
            n_act += t
            assert n_act == aa_cost + verify_cost
            return RunRecord(
                strategy=PROBABILISTIC_HYBRID,
                spec=spec,
                n_act=n_act,
                terminal_L=L,
                success_step=t,
                n_aa_rounds=n_aa_rounds,
                n_doublings=n_doublings,
                seed=seed,
            )
        verify_cost += L
        n_act += L
        state = grow_m(state)


def run_probabilistic_classical(
    spec: GridworldSpec,
    rng: np.random.Generator,
    *,
    seed: int = 0,
) -> RunRecord:
    """Same doubling schedule as the hybrid, but real walk episodes."""
    sx, sy = spec.start
    tx, ty = spec.target
    side = spec.grid_side
    st = kernel_state(rng)
    state = BoyerState(L=1)
    n_act = 0
    n_doublings = 0
    while True:
        if rng.random() < state.jump_probability:
            n_doublings += 1
            state = BoyerState(L=state.L * 2)
        L = state.L
        t = int(_kernels.walk_first_hit(st, sx, sy, tx, ty, side, L))
        if t > 0:
            n_act += t
            return RunRecord(
                strategy=PROBABILISTIC_CLASSICAL,
                spec=spec,
                n_act=n_act,
                terminal_L=L,
                success_step=t,
                n_aa_rounds=0,
                n_doublings=n_doublings,
                seed=seed,
            )
        n_act += L
        state = grow_m(state)


def run_probabilistic_classical_sampled(
    spec: GridworldSpec,
    model: FirstRewardModel,
    rng: np.random.Generator,
    *,
    seed: int = 0,
) -> RunRecord:
    """Probabilistic classical with episodes replaced by exact draws.

    Episode outcomes come from Bernoulli(p_init(L)) and hit steps from the
    exact conditional first-hit distribution — the same shortcut the
    hybrid's verification uses.  Exists to validate that shortcut against
    real walks; not part of the published strategy set.
    """
    if model.spec != spec:
        raise ConfigError(f"model built for {model.spec}, run requested for {spec}")
    state = BoyerState(L=1)
    n_act = 0
    n_doublings = 0
    while True:
        if rng.random() < state.jump_probability:
            n_doublings += 1
            state = BoyerState(L=state.L * 2)
        L = state.L
        if rng.random() < model.p_init(L):
            t = model.sample_hit_step(L, rng)
            n_act += t
            return RunRecord(
                strategy=PROBABILISTIC_CLASSICAL,
                spec=spec,
                n_act=n_act,
                terminal_L=L,
                success_step=t,
                n_aa_rounds=0,
                n_doublings=n_doublings,
                seed=seed,
            )
        n_act += L
        state = grow_m(state)


def run_unrestricted_classical(
    spec: GridworldSpec,
    rng: np.random.Generator,
    *,
    step_cap: int = DEFAULT_STEP_CAP,
    seed: int = 0,
) -> RunRecord:
    """One uninterrupted walk until the target is hit."""
    if step_cap < 1:
        raise ConfigError(f"step_cap must be >= 1, got {step_cap}")
    sx, sy = spec.start
    tx, ty = spec.target
    st = kernel_state(rng)
    t = int(_kernels.walk_first_hit(st, sx, sy, tx, ty, spec.grid_side, step_cap))
    if t == 0:
        raise StepCapError(
            f"no reward within {step_cap} steps for b={spec.base_size} "
            f"d_wall={spec.wall_distance}"
        )
    return RunRecord(
        strategy=UNRESTRICTED_CLASSICAL,
        spec=spec,
        n_act=t,
        terminal_L=t,
        success_step=t,
        n_aa_rounds=0,
        n_doublings=0,
        seed=seed,
    )


def run_fixed_length_hybrid(
    spec: GridworldSpec,
    L: int,
    model: FirstRewardModel,
    rng: np.random.Generator,
    *,
    round_cap: int = DEFAULT_ROUND_CAP,
    seed: int = 0,
) -> RunRecord:
    """Amplified search at a constant episode length (no doubling)."""
    if model.spec != spec:
        raise ConfigError(f"model built for {model.spec}, run requested for {spec}")
    if L < 1:
        raise ConfigError(f"episode length must be >= 1, got {L}")
    if round_cap < 1:
        raise ConfigError(f"round_cap must be >= 1, got {round_cap}")
    p = model.p_init(L)
    state = BoyerState(L=L)
    aa_cost = 0
    verify_cost = 0
    for rounds in range(1, round_cap + 1):
        k = sample_k(state, rng)
        aa_cost += 2 * k * L
        if rng.random() < amplified_probability(p, k):
            t = model.sample_hit_step(L, rng)
            verify_cost += t
            return RunRecord(
                strategy=FIXED_HYBRID,
                spec=spec,
                n_act=aa_cost + verify_cost,
                terminal_L=L,
                success_step=t,
                n_aa_rounds=rounds,
                n_doublings=0,
                seed=seed,
            )
        verify_cost += L
        state = grow_m(state)
    raise RoundCapError(
        f"no reward within {round_cap} rounds at fixed L={L} "
        f"(p_init={p:.3e}) for b={spec.base_size} d_wall={spec.wall_distance}"
    )


def run_fixed_length_classical(
    spec: GridworldSpec,
    L: int,
    rng: np.random.Generator,
    *,
    round_cap: int = DEFAULT_ROUND_CAP,
    seed: int = 0,
) -> RunRecord:
    """Real walk episodes of at most L steps, restarted until reward."""
    if L < 1:
        raise ConfigError(f"episode length must be >= 1, got {L}")
    if round_cap < 1:
        raise ConfigError(f"round_cap must be >= 1, got {round_cap}")
    sx, sy = spec.start
    tx, ty = spec.target
    st = kernel_state(rng)
    n_act, episodes, t = _kernels.fixed_length_episodes(
        st, sx, sy, tx, ty, spec.grid_side, L, round_cap
    )
    if t == 0:
        raise RoundCapError(
            f"no reward within {round_cap} episodes at fixed L={L} "
            f"for b={spec.base_size} d_wall={spec.wall_distance}"
        )
    return RunRecord(
        strategy=FIXED_CLASSICAL,
        spec=spec,
        n_act=int(n_act),
        terminal_L=L,
        success_step=int(t),
        n_aa_rounds=0,
        n_doublings=0,
        seed=seed,
    )


def run_strategy(
    strategy: str,
    spec: GridworldSpec,
    rng: np.random.Generator,
    *,
    model: FirstRewardModel | None = None,
    fixed_L: int | None = None,
    step_cap: int = DEFAULT_STEP_CAP,
    round_cap: int = DEFAULT_ROUND_CAP,
    seed: int = 0,
) -> RunRecord:
    """Uniform dispatch used by the sweep runner."""
    strategy = canonical_strategy(strategy)
    if strategy in CURVE_STRATEGIES and model is None:
        raise ConfigError(f"{strategy} needs a success-curve model")
    if strategy in FIXED_STRATEGIES and fixed_L is None:
        raise ConfigError(f"{strategy} needs a fixed episode length")
    if strategy == PROBABILISTIC_HYBRID:
        return run_probabilistic_hybrid(spec, model, rng, seed=seed)
    if strategy == PROBABILISTIC_CLASSICAL:
        return run_probabilistic_classical(spec, rng, seed=seed)
    if strategy == UNRESTRICTED_CLASSICAL:
        return run_unrestricted_classical(spec, rng, step_cap=step_cap, seed=seed)
    if strategy == FIXED_HYBRID:
        return run_fixed_length_hybrid(spec, fixed_L, model, rng, round_cap=round_cap, seed=seed)
    return run_fixed_length_classical(spec, fixed_L, rng, round_cap=round_cap, seed=seed)

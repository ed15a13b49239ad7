import math

import numpy as np
import pytest

from hybridwalk.errors import ConfigError, RoundCapError, StepCapError
from hybridwalk.experiment import (
    fixed_classical_expected_cost,
    fixed_hybrid_expected_cost,
    probabilistic_classical_expected_cost,
    probabilistic_hybrid_expected_cost,
)
from hybridwalk.gridworld import GridworldSpec
from hybridwalk.pinit import build_model, expected_first_passage
from hybridwalk.strategies import (
    FIXED_CLASSICAL,
    FIXED_HYBRID,
    PROBABILISTIC_CLASSICAL,
    PROBABILISTIC_HYBRID,
    STRATEGIES,
    UNRESTRICTED_CLASSICAL,
    RunRecord,
    canonical_strategy,
    run_fixed_length_classical,
    run_fixed_length_hybrid,
    run_probabilistic_classical,
    run_probabilistic_classical_sampled,
    run_probabilistic_hybrid,
    run_strategy,
    run_unrestricted_classical,
)

SPEC = GridworldSpec(3, 0)


@pytest.fixture(scope="module")
def model():
    return build_model(SPEC, np.random.default_rng(0), method="exact")


def rng(seed=0):
    return np.random.default_rng(seed)


def _mean_se(values):
    arr = np.asarray(values, dtype=float)
    return arr.mean(), arr.std(ddof=1) / math.sqrt(len(arr))


# --- naming -----------------------------------------------------------------


def test_canonical_strategy_aliases():
    assert canonical_strategy("hybrid") == PROBABILISTIC_HYBRID
    assert canonical_strategy("prob-hybrid") == PROBABILISTIC_HYBRID
    assert canonical_strategy("PROB_CLASSICAL") == PROBABILISTIC_CLASSICAL
    assert canonical_strategy("unrestricted") == UNRESTRICTED_CLASSICAL
    assert canonical_strategy("fixed-hybrid") == FIXED_HYBRID
    assert canonical_strategy(" fixed_classical ") == FIXED_CLASSICAL
    for name in STRATEGIES:
        assert canonical_strategy(name) == name
    with pytest.raises(ConfigError):
        canonical_strategy("quantum")


# --- record invariants ---------------------------------------------------------


def test_run_record_validation():
    with pytest.raises(ValueError):  # success before the shortest path
        RunRecord(PROBABILISTIC_HYBRID, SPEC, n_act=10, terminal_L=8,
                  success_step=2, n_aa_rounds=1, n_doublings=3, seed=0)
    with pytest.raises(ValueError):  # cost cannot undercut the final episode
        RunRecord(PROBABILISTIC_HYBRID, SPEC, n_act=3, terminal_L=8,
                  success_step=4, n_aa_rounds=1, n_doublings=3, seed=0)
    with pytest.raises(ValueError):  # doubling count must explain terminal_L
        RunRecord(PROBABILISTIC_CLASSICAL, SPEC, n_act=10, terminal_L=8,
                  success_step=4, n_aa_rounds=0, n_doublings=2, seed=0)


# --- determinism ------------------------------------------------------------------


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_same_seed_reproduces_run(strategy, model):
    kwargs = {"model": model} if strategy in (PROBABILISTIC_HYBRID, FIXED_HYBRID) else {}
    if strategy in (FIXED_HYBRID, FIXED_CLASSICAL):
        kwargs["fixed_L"] = 8
    a = run_strategy(strategy, SPEC, rng(21), **kwargs)
    b = run_strategy(strategy, SPEC, rng(21), **kwargs)
    assert a == b


def test_distinct_seeds_vary(model):
    acts = {run_probabilistic_hybrid(SPEC, model, rng(i)).n_act for i in range(12)}
    assert len(acts) > 1


# --- unrestricted walk ---------------------------------------------------------------


def test_unrestricted_counts_every_step():
    rec = run_unrestricted_classical(SPEC, rng(1))
    assert rec.n_act == rec.terminal_L == rec.success_step
    assert rec.n_aa_rounds == rec.n_doublings == 0
    assert rec.n_act >= SPEC.min_episode_length


def test_unrestricted_step_cap():
    with pytest.raises(StepCapError):
        run_unrestricted_classical(SPEC, rng(0), step_cap=2)
    with pytest.raises(ConfigError):
        run_unrestricted_classical(SPEC, rng(0), step_cap=0)


def test_unrestricted_mean_matches_hitting_time():
    g = rng(3)
    acts = [run_unrestricted_classical(SPEC, g).n_act for _ in range(4000)]
    mean, se = _mean_se(acts)
    assert abs(mean - expected_first_passage(SPEC)) < 4 * se


# --- probabilistic strategies ------------------------------------------------------------


def test_hybrid_terminal_length_is_a_power_of_two(model):
    g = rng(4)
    for _ in range(50):
        rec = run_probabilistic_hybrid(SPEC, model, g)
        assert rec.terminal_L == 1 << rec.n_doublings
        assert rec.success_step <= rec.terminal_L
        assert rec.strategy == PROBABILISTIC_HYBRID


def test_hybrid_rejects_foreign_model(model):
    with pytest.raises(ConfigError):
        run_probabilistic_hybrid(GridworldSpec(4, 0), model, rng(0))
    with pytest.raises(ConfigError):
        run_probabilistic_classical_sampled(GridworldSpec(4, 0), model, rng(0))


def test_hybrid_mean_matches_exact_expectation(model):
    g = rng(5)
    acts = [run_probabilistic_hybrid(SPEC, model, g).n_act for _ in range(4000)]
    mean, se = _mean_se(acts)
    assert abs(mean - probabilistic_hybrid_expected_cost(model)) < 4 * se


def test_classical_walks_mean_matches_exact_expectation(model):
    g = rng(6)
    acts = [run_probabilistic_classical(SPEC, g).n_act for _ in range(4000)]
    mean, se = _mean_se(acts)
    assert abs(mean - probabilistic_classical_expected_cost(model)) < 4 * se


def test_sampled_classical_mean_matches_exact_expectation(model):
    g = rng(7)
    acts = [
        run_probabilistic_classical_sampled(SPEC, model, g).n_act for _ in range(4000)
    ]
    mean, se = _mean_se(acts)
    assert abs(mean - probabilistic_classical_expected_cost(model)) < 4 * se


# --- fixed-length strategies ----------------------------------------------------------------


def test_fixed_classical_mean_matches_closed_form(model):
    g = rng(8)
    L = 8
    acts = [run_fixed_length_classical(SPEC, L, g).n_act for _ in range(4000)]
    mean, se = _mean_se(acts)
    assert abs(mean - fixed_classical_expected_cost(model, L)) < 4 * se


def test_fixed_hybrid_mean_matches_closed_form(model):
    g = rng(9)
    L = 8
    acts = [run_fixed_length_hybrid(SPEC, L, model, g).n_act for _ in range(4000)]
    mean, se = _mean_se(acts)
    assert abs(mean - fixed_hybrid_expected_cost(model, L)) < 4 * se


def test_fixed_runs_report_their_length(model):
    rec = run_fixed_length_classical(SPEC, 6, rng(10))
    assert rec.terminal_L == 6 and rec.success_step <= 6
    # The amplified variant reads the curve, so L must be a curve point.
    rec = run_fixed_length_hybrid(SPEC, 16, model, rng(10))
    assert rec.terminal_L == 16 and rec.n_aa_rounds >= 1


def test_fixed_round_caps(model):
    # L below the shortest path: every episode fails, the cap must trip.
    with pytest.raises(RoundCapError):
        run_fixed_length_classical(SPEC, 3, rng(0), round_cap=50)
    with pytest.raises(RoundCapError):
        run_fixed_length_hybrid(SPEC, 2, model, rng(0), round_cap=50)
    with pytest.raises(ConfigError):
        run_fixed_length_classical(SPEC, 0, rng(0))
    with pytest.raises(ConfigError):
        run_fixed_length_hybrid(SPEC, 8, model, rng(0), round_cap=0)


# --- dispatch -------------------------------------------------------------------------


def test_run_strategy_requires_model_and_length(model):
    with pytest.raises(ConfigError):
        run_strategy("hybrid", SPEC, rng(0))  # no curve model
    with pytest.raises(ConfigError):
        run_strategy("fixed-hybrid", SPEC, rng(0), model=model)  # no fixed_L
    rec = run_strategy("unrestricted", SPEC, rng(1))
    assert rec.strategy == UNRESTRICTED_CLASSICAL

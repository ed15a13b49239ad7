import math

import pytest
from hypothesis import given, strategies as st

from hybridwalk.gridworld import (
    Action,
    GridworldSpec,
    pinit_min_closed_form,
    reward,
    step,
)

SPECS = st.builds(
    GridworldSpec,
    base_size=st.integers(min_value=2, max_value=9),
    wall_distance=st.integers(min_value=0, max_value=8),
)


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        GridworldSpec(1, 0)
    with pytest.raises(ValueError):
        GridworldSpec(5, -1)


@pytest.mark.parametrize(
    "b, d, side, start, target, L_min",
    [
        (2, 0, 2, (0, 0), (1, 1), 2),
        (5, 0, 5, (0, 0), (4, 4), 8),
        (7, 16, 39, (16, 16), (22, 22), 12),
        (9, 64, 137, (64, 64), (72, 72), 16),
    ],
)
def test_geometry(b, d, side, start, target, L_min):
    spec = GridworldSpec(b, d)
    assert spec.grid_side == side
    assert spec.n_states == side * side
    assert spec.start == start
    assert spec.target == target
    assert spec.min_episode_length == L_min
    assert spec.contains(start) and spec.contains(target)


@given(SPECS)
def test_min_length_is_manhattan_distance(spec):
    (sx, sy), (tx, ty) = spec.start, spec.target
    assert spec.min_episode_length == abs(tx - sx) + abs(ty - sy)


@given(
    SPECS,
    st.integers(min_value=0, max_value=200),
    st.integers(min_value=0, max_value=200),
    st.sampled_from(list(Action)),
)
def test_step_stays_inside_and_moves_at_most_one(spec, x, y, action):
    pos = (x % spec.grid_side, y % spec.grid_side)
    nxt = step(spec, pos, action)
    assert spec.contains(nxt)
    assert abs(nxt[0] - pos[0]) + abs(nxt[1] - pos[1]) <= 1


def test_step_moves_and_bumps():
    spec = GridworldSpec(3, 0)
    assert step(spec, (1, 1), Action.UP) == (1, 2)
    assert step(spec, (1, 1), Action.DOWN) == (1, 0)
    assert step(spec, (1, 1), Action.LEFT) == (0, 1)
    assert step(spec, (1, 1), Action.RIGHT) == (2, 1)
    # Wall bumps leave the agent in place on every edge.
    assert step(spec, (0, 0), Action.LEFT) == (0, 0)
    assert step(spec, (0, 0), Action.DOWN) == (0, 0)
    assert step(spec, (2, 2), Action.RIGHT) == (2, 2)
    assert step(spec, (2, 2), Action.UP) == (2, 2)


def test_step_outside_grid_rejected():
    spec = GridworldSpec(2, 0)
    with pytest.raises(ValueError):
        step(spec, (5, 0), Action.UP)


def test_reward_only_on_entering_target():
    spec = GridworldSpec(3, 0)
    tx, ty = spec.target
    assert reward(spec, (tx - 1, ty), Action.RIGHT) == 1
    assert reward(spec, (tx, ty - 1), Action.UP) == 1
    # Leaving or failing to enter scores nothing.
    assert reward(spec, (tx, ty), Action.LEFT) == 0
    # A wall bump while standing on the target is not an entry.
    assert reward(spec, (tx, ty), Action.UP) == 0
    assert reward(spec, (0, 0), Action.UP) == 0


@given(SPECS, st.sampled_from(list(Action)))
def test_reward_matches_step_transition(spec, action):
    pos = spec.start
    nxt = step(spec, pos, action)
    assert reward(spec, pos, action) == int(nxt == spec.target and nxt != pos)


@pytest.mark.parametrize(
    "b, expected",
    [
        (2, 2 / 16),  # two staircase paths of length 2
        (3, math.comb(4, 2) / 4 ** 4),
        (5, math.comb(8, 4) / 4 ** 8),
    ],
)
def test_pinit_min_closed_form_examples(b, expected):
    assert pinit_min_closed_form(GridworldSpec(b, 0)) == pytest.approx(expected, abs=0)


def test_pinit_min_value_cited_for_base_five():
    assert pinit_min_closed_form(GridworldSpec(5, 0)) == pytest.approx(1.068e-3, rel=2e-3)


@given(st.integers(min_value=2, max_value=9), st.integers(min_value=0, max_value=64))
def test_pinit_min_ignores_wall_distance(b, d):
    assert pinit_min_closed_form(GridworldSpec(b, d)) == pinit_min_closed_form(
        GridworldSpec(b, 0)
    )

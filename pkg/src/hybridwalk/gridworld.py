"""Deterministic square gridworld with an outer wall ring.

The playable region is a quadratic base area of side ``base_size`` whose
diagonally opposing corners hold the start and target cells.  A ring of
free cells of width ``wall_distance`` surrounds the base area and is
bounded by impassable outer walls: moving into a wall leaves the agent
where it is.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Action(enum.IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


N_ACTIONS = 4

# (dx, dy) per action; origin at the lower-left outer corner, y grows upward.
_MOVES = {
    Action.UP: (0, 1),
    Action.DOWN: (0, -1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
}

Position = tuple[int, int]


@dataclass(frozen=True, slots=True)
class GridworldSpec:
    """Geometry of one gridworld layout.

    ``base_size`` is the side length of the inner square holding start and
    target; ``wall_distance`` is the thickness of the free ring between the
    base area and the outer walls.
    """

    base_size: int
    wall_distance: int = 0

    def __post_init__(self) -> None:
        if self.base_size < 2:
            raise ValueError(f"base_size must be >= 2, got {self.base_size}")
        if self.wall_distance < 0:
            raise ValueError(f"wall_distance must be >= 0, got {self.wall_distance}")

    @property
    def grid_side(self) -> int:
        return self.base_size + 2 * self.wall_distance

    @property
    def n_states(self) -> int:
        return self.grid_side ** 2

    @property
    def start(self) -> Position:
        return (self.wall_distance, self.wall_distance)

    @property
    def target(self) -> Position:
        far = self.wall_distance + self.base_size - 1
        return (far, far)

    @property
    def min_episode_length(self) -> int:
        """Shortest possible number of steps from start to target."""
        return 2 * (self.base_size - 1)

    def contains(self, pos: Position) -> bool:
        x, y = pos
        return 0 <= x < self.grid_side and 0 <= y < self.grid_side


def step(spec: GridworldSpec, pos: Position, action: Action) -> Position:
    """Next cell after taking ``action`` from ``pos``; wall bumps stay put."""
    if not spec.contains(pos):
        raise ValueError(f"position {pos} outside grid of side {spec.grid_side}")
    dx, dy = _MOVES[Action(action)]
    x, y = pos[0] + dx, pos[1] + dy
    if 0 <= x < spec.grid_side and 0 <= y < spec.grid_side:
        return (x, y)
    return (pos[0], pos[1])


def reward(spec: GridworldSpec, pos: Position, action: Action) -> int:
    """1 iff the action moves the agent onto the target cell, else 0.

    A wall bump never counts, even when the agent already stands on the
    target: the reward is tied to entering the cell.
    """
    nxt = step(spec, pos, action)
    return int(nxt == spec.target and nxt != pos)


def pinit_min_closed_form(spec: GridworldSpec) -> float:
    """Success probability of a uniform walk at the minimal episode length.

    Only monotone staircase paths of length 2(b-1) reach the target, so the
    probability is binom(2(b-1), b-1) / 4^(2(b-1)), independent of the wall
    distance.
    """
    n = spec.base_size - 1
    return math.comb(2 * n, n) / 4 ** (2 * n)

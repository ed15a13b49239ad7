"""Closed-form amplitude-amplification emulation and its run-time schedule.

Amplification of a success probability ``p`` by ``k`` Grover iterations is
emulated by the exact relation sin²((2k+1)·arcsin(√p)), so no statevector
is ever simulated.  The schedule for the unknown-success-probability case
follows Boyer et al.: the iteration count is drawn uniformly below a bound
``m`` that grows by a factor λ = 5/4 after every unrewarded round, capped
at m_max = √(4^L) = 2^L where amplification is guaranteed useful.

The episode-doubling probability φ_L(m) = 2·ln(m)/(L·ln 4) ramps from 0 at
m = 1 to exactly 1 when m reaches m_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

GROWTH_FACTOR = 1.25

# 2.0**L overflows a float beyond this; the cap is then effectively infinite.
_MAX_FINITE_EXPONENT = 1023

_PROB_SLACK = 1e-12


def _checked_probability(p: float) -> float:
    if not -_PROB_SLACK <= p <= 1.0 + _PROB_SLACK:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def amplified_probability(p: float, k: int) -> float:
    """Success probability after k amplification iterations on base p."""
    p = _checked_probability(p)
    if k < 0:
        raise ValueError(f"iteration count must be >= 0, got {k}")
    if k == 0:
        return p
    boosted = math.sin((2 * k + 1) * math.asin(math.sqrt(p))) ** 2
    return min(max(boosted, 0.0), 1.0)


def max_bound(L: int) -> float:
    """Saturation value of the sampling bound m for episode length L."""
    if L < 1:
        raise ValueError(f"episode length must be >= 1, got {L}")
    if L > _MAX_FINITE_EXPONENT:
        return math.inf
    return 2.0 ** L


def jump_probability(m: float, L: int) -> float:
    """Probability φ_L(m) of doubling the episode length this round."""
    if m < 1.0:
        raise ValueError(f"bound m must be >= 1, got {m}")
    if m >= max_bound(L):
        return 1.0
    phi = 2.0 * math.log(m) / (L * math.log(4.0))
    return min(max(phi, 0.0), 1.0)


@dataclass(frozen=True, slots=True)
class BoyerState:
    """Sampling-bound state for one episode length.

    ``m`` is the (real-valued) exclusive upper bound for iteration-count
    sampling; ``lam`` the per-failure growth factor.
    """

    L: int
    m: float = 1.0
    lam: float = GROWTH_FACTOR

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError(f"episode length must be >= 1, got {self.L}")
        if not 1.0 <= self.m <= self.m_max:
            raise ValueError(f"bound m={self.m} outside [1, {self.m_max}]")
        if not 1.0 < self.lam < 2.0:
            raise ValueError(f"growth factor must be in (1, 2), got {self.lam}")

    @property
    def m_max(self) -> float:
        return max_bound(self.L)

    @property
    def jump_probability(self) -> float:
        return jump_probability(self.m, self.L)


def sample_k(state: BoyerState, rng: np.random.Generator) -> int:
    """Uniform iteration count from {0, ..., max(1, floor(m)) - 1}.

    Amplification stays off (k = 0 forced) until the bound has grown past
    the next whole iteration count; the support gains one value each time
    m crosses an integer.
    """
    bound = math.floor(state.m)
    if bound <= 1:
        return 0
    if bound <= 1 << 62:
        return int(rng.integers(0, bound))
    # Beyond integer-generator range (never reached by realistic schedules):
    # keep the full support at slightly uneven weights.
    return min(int(rng.random() * bound), bound - 1)


def grow_m(state: BoyerState) -> BoyerState:
    """Post-failure growth m ← min(λ·m, m_max)."""
    return replace(state, m=min(state.lam * state.m, state.m_max))

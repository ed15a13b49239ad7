"""Deterministic seed derivation for runs, curve builds, and walk kernels.

Every random decision in the package descends from a single integer
``seed_base`` through ``numpy.random.SeedSequence`` spawn keys.  The keys
are namespaced tuples, so distinct purposes and distinct (cell, run)
pairs get distinct, independent streams by construction:

    run stream    : SeedSequence(seed_base, spawn_key=(0, cell_index, run_index))
    curve stream  : SeedSequence(seed_base, spawn_key=(1, base_size, wall_distance, s))
    fixed-L stream: SeedSequence(seed_base, spawn_key=(2, strategy_index, L_index, run_index))

Walk kernels use a self-contained PCG32 generator (see ``_kernels``) whose
64-bit state/increment pair is drawn from the owning stream.
"""

from __future__ import annotations

import numpy as np

_NS_RUN = 0
_NS_CURVE = 1
_NS_FIXED = 2


def run_seed_sequence(seed_base: int, cell_index: int, run_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed_base, spawn_key=(_NS_RUN, cell_index, run_index))


def curve_seed_sequence(
    seed_base: int, base_size: int, wall_distance: int, stream: int = 0
) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        seed_base, spawn_key=(_NS_CURVE, base_size, wall_distance, stream)
    )


def fixed_seed_sequence(
    seed_base: int, strategy_index: int, length_index: int, run_index: int
) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        seed_base, spawn_key=(_NS_FIXED, strategy_index, length_index, run_index)
    )


def generator_from(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seq))


def run_generator(seed_base: int, cell_index: int, run_index: int) -> np.random.Generator:
    return generator_from(run_seed_sequence(seed_base, cell_index, run_index))


def fixed_generator(
    seed_base: int, strategy_index: int, length_index: int, run_index: int
) -> np.random.Generator:
    return generator_from(
        fixed_seed_sequence(seed_base, strategy_index, length_index, run_index)
    )


def kernel_state(rng: np.random.Generator) -> np.ndarray:
    """Fresh PCG32 (state, increment) pair drawn from ``rng``; increment odd."""
    st = rng.integers(0, 2 ** 64, size=2, dtype=np.uint64)
    st[1] |= np.uint64(1)
    return st

"""JIT-compiled hot loops: counter RNG and raw random-walk stepping.

The walk kernels carry their own tiny PCG32 generator so a whole run (or
batch) executes inside compiled code with no per-step Python overhead.
The (state, increment) pair lives in a 2-element uint64 array that is
advanced in place, which keeps runs deterministic and independent of how
work is scheduled across processes.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_PCG_MULT = np.uint64(6364136223846793005)


@nb.njit(nb.uint32(nb.uint64[::1]), cache=True, nogil=True, inline="always")
def pcg32_next(st):
    old = st[0]
    st[0] = old * _PCG_MULT + st[1]
    xorshifted = nb.uint32(((old >> np.uint64(18)) ^ old) >> np.uint64(27))
    rot = nb.uint32(old >> np.uint64(59))
    return nb.uint32(
        (xorshifted >> rot) | (xorshifted << ((np.uint32(32) - rot) & np.uint32(31)))
    )


@nb.njit(nb.int64(nb.uint64[::1], nb.int64, nb.int64, nb.int64, nb.int64, nb.int64, nb.int64), cache=True, nogil=True)
def walk_first_hit(st, sx, sy, tx, ty, side, max_steps):
    """Uniform 4-direction walk with bump-stay walls.

    Returns the first step index at which the walk lands on (tx, ty), or 0
    if the target is not reached within max_steps.
    """
    x = sx
    y = sy
    for t in range(1, max_steps + 1):
        a = pcg32_next(st) >> np.uint32(30)
        if a == np.uint32(0):
            if y + 1 < side:
                y += 1
        elif a == np.uint32(1):
            if y > 0:
                y -= 1
        elif a == np.uint32(2):
            if x > 0:
                x -= 1
        else:
            if x + 1 < side:
                x += 1
        if x == tx and y == ty:
            return t
    return 0


@nb.njit(nb.int64(nb.uint64[::1], nb.int64, nb.int64, nb.int64, nb.int64, nb.int64, nb.int64, nb.int64), cache=True, nogil=True)
def count_batch_hits(st, n_walks, sx, sy, tx, ty, side, length):
    """Number of walks (out of n_walks, each at most `length` steps) that hit."""
    hits = 0
    for _ in range(n_walks):
        if walk_first_hit(st, sx, sy, tx, ty, side, length) > 0:
            hits += 1
    return hits


@nb.njit(
    nb.types.UniTuple(nb.int64, 3)(
        nb.uint64[::1], nb.int64, nb.int64, nb.int64, nb.int64, nb.int64, nb.int64, nb.int64
    ),
    cache=True,
    nogil=True,
)
def fixed_length_episodes(st, sx, sy, tx, ty, side, length, round_cap):
    """Episodes of at most `length` steps, restarted until the first hit.

    Returns (n_act, episodes, hit_step); hit_step is 0 when round_cap
    episodes all failed, with n_act accumulated over the failures.
    """
    n_act = 0
    for episode in range(1, round_cap + 1):
        t = walk_first_hit(st, sx, sy, tx, ty, side, length)
        if t > 0:
            return n_act + t, episode, t
        n_act += length
    return n_act, round_cap, 0


@nb.njit(
    nb.float64(
        nb.float64[:, ::1], nb.float64[:, ::1], nb.int64, nb.int64, nb.float64[::1], nb.int64, nb.int64
    ),
    cache=True,
    nogil=True,
    fastmath=True,
)
def dp_absorb(occ, scratch, tx, ty, absorbed, t_start, t_stop):
    """Propagate an occupation distribution with an absorbing target cell.

    For each step t in [t_start, t_stop) the mass arriving at (tx, ty) is
    recorded in absorbed[t] and removed.  On return `occ` holds the
    surviving distribution after the final step (whatever the step-count
    parity) and the surviving total mass is returned.
    """
    n = occ.shape[0]
    cur = occ
    nxt = scratch
    flipped = False
    for t in range(t_start, t_stop):
        for x in range(1, n - 1):
            for y in range(1, n - 1):
                nxt[x, y] = 0.25 * (cur[x - 1, y] + cur[x + 1, y] + cur[x, y - 1] + cur[x, y + 1])
        for y in range(1, n - 1):
            nxt[0, y] = 0.25 * (cur[1, y] + cur[0, y - 1] + cur[0, y + 1] + cur[0, y])
            nxt[n - 1, y] = 0.25 * (cur[n - 2, y] + cur[n - 1, y - 1] + cur[n - 1, y + 1] + cur[n - 1, y])
        for x in range(1, n - 1):
            nxt[x, 0] = 0.25 * (cur[x - 1, 0] + cur[x + 1, 0] + cur[x, 1] + cur[x, 0])
            nxt[x, n - 1] = 0.25 * (cur[x - 1, n - 1] + cur[x + 1, n - 1] + cur[x, n - 2] + cur[x, n - 1])
        nxt[0, 0] = 0.25 * (cur[1, 0] + cur[0, 1] + 2.0 * cur[0, 0])
        nxt[n - 1, 0] = 0.25 * (cur[n - 2, 0] + cur[n - 1, 1] + 2.0 * cur[n - 1, 0])
        nxt[0, n - 1] = 0.25 * (cur[1, n - 1] + cur[0, n - 2] + 2.0 * cur[0, n - 1])
        nxt[n - 1, n - 1] = 0.25 * (cur[n - 2, n - 1] + cur[n - 1, n - 2] + 2.0 * cur[n - 1, n - 1])
        absorbed[t] = nxt[tx, ty]
        nxt[tx, ty] = 0.0
        cur, nxt = nxt, cur
        flipped = not flipped
    if flipped:
        for x in range(n):
            for y in range(n):
                nxt[x, y] = cur[x, y]
        cur = nxt
    total = 0.0
    for x in range(n):
        for y in range(n):
            total += cur[x, y]
    return total


def warmup() -> None:
    """Force JIT compilation of all kernels (cached on disk afterwards)."""
    st = np.array([12345, 54321], dtype=np.uint64)
    pcg32_next(st)
    walk_first_hit(st, 0, 0, 1, 1, 2, 4)
    count_batch_hits(st, 2, 0, 0, 1, 1, 2, 4)
    fixed_length_episodes(st, 0, 0, 1, 1, 2, 4, 8)
    occ = np.zeros((2, 2))
    occ[0, 0] = 1.0
    dp_absorb(occ, np.empty_like(occ), 1, 1, np.zeros(3), 1, 3)

"""Success-probability curves p_init(L) and first-hit statistics.

Three ways to obtain the probability that a uniform random walk finds the
target within L steps:

* ``exact_dp`` — exact forward propagation of the cell-occupation
  distribution with the target made absorbing,
* ``estimate_mc`` — the sampling protocol used for the published curves
  (batches of 2^14 walks until at least 16 successes or a shot cap),
* ``build_curve`` / ``build_model`` — whole curves over powers of two (or
  an explicit length grid), choosing DP where affordable and MC beyond.

The same DP pass yields the exact first-hit-step distribution, which
``HitStepSampler`` inverts for drawing verification hit steps, and the
module owns the on-disk curve cache (``CurveStore``).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels
from ._rng import curve_seed_sequence, generator_from, kernel_state
from .errors import (
    CacheCorruptError,
    CacheKeyMismatchError,
    CacheMissError,
    CapError,
    CurveLookupError,
    SolverError,
)
from .gridworld import GridworldSpec

BATCH_SIZE = 1 << 14
MIN_SUCCESSES = 16
DEFAULT_SHOT_CAP = 1 << 24
CONVERGENCE_THRESHOLD = 0.999
MAX_CURVE_LENGTH = 1 << 22
DP_COST_LIMIT = 100_000_000_000

METHOD_MC = "monte_carlo"
METHOD_DP = "exact_dp"
METHOD_INTERPOLATED = "interpolated"

CURVE_FORMAT = "hybridwalk-curve/1"

_POLICIES = ("auto", "exact", "mc")


@dataclass(frozen=True, slots=True)
class CurvePoint:
    """One measured or computed value of p_init at episode length L."""

    L: int
    estimate: float
    n_shots: int
    n_success: int
    method: str

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError(f"episode length must be >= 1, got {self.L}")
        if not 0.0 <= self.estimate <= 1.0:
            raise ValueError(f"estimate {self.estimate} outside [0, 1]")
        if self.method not in (METHOD_MC, METHOD_DP, METHOD_INTERPOLATED):
            raise ValueError(f"unknown point method {self.method!r}")
        if self.n_shots < 0 or self.n_success < 0:
            raise ValueError("shot and success counts must be >= 0")

    @property
    def low_confidence(self) -> bool:
        """True for MC points that stopped on the shot cap, not on successes."""
        return self.method == METHOD_MC and self.n_success < MIN_SUCCESSES


class SuccessCurve:
    """p_init(L) at a fixed set of episode lengths for one layout.

    Lookups are exact-key only, except that a curve which reached its
    convergence threshold answers queries beyond its last point with that
    last estimate (a lower bound, since p_init is nondecreasing in L).
    """

    def __init__(
        self,
        spec: GridworldSpec,
        points: Mapping[int, CurvePoint] | Iterable[CurvePoint],
        converged_at: int | None = None,
    ) -> None:
        if isinstance(points, Mapping):
            ordered = [points[L] for L in points]
        else:
            ordered = list(points)
        self.spec = spec
        self.points: dict[int, CurvePoint] = {}
        last = 0
        for pt in ordered:
            if pt.L <= last:
                raise ValueError("curve lengths must be strictly increasing")
            self.points[pt.L] = pt
            last = pt.L
        if not self.points:
            raise ValueError("a curve needs at least one point")
        if converged_at is not None and converged_at not in self.points:
            raise ValueError(f"converged_at={converged_at} is not a curve point")
        self.converged_at = converged_at

    @property
    def lengths(self) -> list[int]:
        return list(self.points)

    @property
    def max_length(self) -> int:
        return next(reversed(self.points))

    def point(self, L: int) -> CurvePoint:
        try:
            return self.points[L]
        except KeyError:
            raise CurveLookupError(
                f"curve for b={self.spec.base_size} d_wall={self.spec.wall_distance} "
                f"has no point at L={L} (available up to {self.max_length})"
            ) from None

    def p_init(self, L: int) -> float:
        pt = self.points.get(L)
        if pt is not None:
            return pt.estimate
        if self.converged_at is not None and L > self.max_length:
            return self.points[self.max_length].estimate
        return self.point(L).estimate  # raises with a uniform message

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuccessCurve):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.points == other.points
            and self.converged_at == other.converged_at
        )

    def __repr__(self) -> str:
        return (
            f"SuccessCurve(b={self.spec.base_size}, d_wall={self.spec.wall_distance}, "
            f"n_points={len(self.points)}, converged_at={self.converged_at})"
        )


@dataclass(frozen=True)
class FirstHitDistribution:
    """Exact distribution of the first hit step within a finite horizon.

    ``masses[t]`` is the probability of first reaching the target at
    exactly step t (index 0 is always 0); ``failure_mass`` the probability
    of not reaching it within the horizon.
    """

    spec: GridworldSpec
    horizon: int
    masses: np.ndarray
    failure_mass: float

    def mass(self, t: int) -> float:
        if not 1 <= t <= self.horizon:
            raise ValueError(f"step {t} outside 1..{self.horizon}")
        return float(self.masses[t])

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.masses)


def absorption_profile(spec: GridworldSpec, length: int) -> tuple[np.ndarray, float]:
    """Per-step first-hit masses up to ``length`` plus the surviving mass."""
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    n = spec.grid_side
    occ = np.zeros((n, n))
    occ[spec.start] = 1.0
    masses = np.zeros(length + 1)
    survive = 1.0
    if length >= 1:
        tx, ty = spec.target
        survive = _kernels.dp_absorb(occ, np.empty_like(occ), tx, ty, masses, 1, length + 1)
    return masses, float(survive)


def exact_dp(spec: GridworldSpec, L: int) -> float:
    """Exact probability of reaching the target within L steps."""
    masses, _ = absorption_profile(spec, L)
    return min(float(masses.sum()), 1.0)


def first_hit_distribution(spec: GridworldSpec, L: int) -> FirstHitDistribution:
    if L < 1:
        raise ValueError(f"horizon must be >= 1, got {L}")
    masses, survive = absorption_profile(spec, L)
    return FirstHitDistribution(spec=spec, horizon=L, masses=masses, failure_mass=survive)


def estimate_mc(
    spec: GridworldSpec,
    L: int,
    rng: np.random.Generator,
    shot_cap: int = DEFAULT_SHOT_CAP,
    *,
    batch_size: int = BATCH_SIZE,
    min_successes: int = MIN_SUCCESSES,
) -> CurvePoint:
    """Monte-Carlo p_init(L): batches of walks until enough successes.

    Walks stop early on hitting the target.  A point that exhausts the
    shot cap with fewer than ``min_successes`` successes is returned as-is
    and identifiable from its raw counts (``low_confidence``).
    """
    if L < 1:
        raise ValueError(f"episode length must be >= 1, got {L}")
    if shot_cap < batch_size or shot_cap % batch_size:
        raise ValueError(f"shot_cap must be a positive multiple of {batch_size}")
    sx, sy = spec.start
    tx, ty = spec.target
    side = spec.grid_side
    n_shots = 0
    n_success = 0
    while n_success < min_successes and n_shots < shot_cap:
        st = kernel_state(rng)
        n_success += int(_kernels.count_batch_hits(st, batch_size, sx, sy, tx, ty, side, L))
        n_shots += batch_size
    return CurvePoint(
        L=L,
        estimate=n_success / n_shots,
        n_shots=n_shots,
        n_success=n_success,
        method=METHOD_MC,
    )


class HitStepSampler:
    """Draws hit steps T conditioned on T ≤ L for one layout.

    Within the exact profile's horizon the draw inverts the cumulative
    first-hit distribution; beyond it, real walks of at most L steps are
    rejection-sampled (cheap there, since curves only extend past their
    exact horizon once p_init is close to 1).
    """

    def __init__(self, spec: GridworldSpec, profile: np.ndarray) -> None:
        self.spec = spec
        self._cum = np.cumsum(np.asarray(profile, dtype=float))

    @property
    def horizon(self) -> int:
        return len(self._cum) - 1

    def sample(self, L: int, rng: np.random.Generator, *, max_tries: int = 1_000_000) -> int:
        if L < 1:
            raise ValueError(f"episode length must be >= 1, got {L}")
        if L <= self.horizon:
            total = float(self._cum[L])
            if total <= 0.0:
                raise ValueError(
                    f"no success mass within {L} steps for b={self.spec.base_size} "
                    f"d_wall={self.spec.wall_distance}"
                )
            u = rng.random() * total
            return int(np.searchsorted(self._cum, u, side="right"))
        sx, sy = self.spec.start
        tx, ty = self.spec.target
        side = self.spec.grid_side
        st = kernel_state(rng)
        for _ in range(max_tries):
            t = int(_kernels.walk_first_hit(st, sx, sy, tx, ty, side, L))
            if t > 0:
                return t
        raise CapError(
            f"no hit within {max_tries} rejection walks at L={L}; "
            "success probability appears to be ~0"
        )


class FirstRewardModel:
    """Success curve plus exact hit-step sampling for one layout."""

    def __init__(self, curve: SuccessCurve, profile: np.ndarray) -> None:
        self.curve = curve
        self.profile = np.asarray(profile, dtype=float)
        self.sampler = HitStepSampler(curve.spec, self.profile)

    @property
    def spec(self) -> GridworldSpec:
        return self.curve.spec

    def p_init(self, L: int) -> float:
        return self.curve.p_init(L)

    def sample_hit_step(self, L: int, rng: np.random.Generator) -> int:
        return self.sampler.sample(L, rng)

    def conditional_mean_hit(self, L: int) -> float:
        """Exact E[T | T <= L] from the first-hit profile."""
        if L >= len(self.profile):
            raise CurveLookupError(
                f"first-hit profile covers t <= {len(self.profile) - 1}, need L={L}"
            )
        masses = self.profile[: L + 1]
        total = masses.sum()
        if total <= 0.0:
            raise CurveLookupError(f"target unreachable within L={L} steps")
        return float(np.arange(L + 1) @ masses / total)


def _power_lengths(max_length: int) -> list[int]:
    lengths = []
    L = 1
    while L <= max_length:
        lengths.append(L)
        L *= 2
    return lengths


def curve_consumes_rng(
    spec: GridworldSpec,
    method: str = "auto",
    lengths: Sequence[int] | None = None,
    max_length: int = MAX_CURVE_LENGTH,
    dp_cost_limit: int = DP_COST_LIMIT,
) -> bool:
    """True when building this curve could draw from the RNG.

    "auto" is judged by the worst-case horizon (ignoring early convergence
    stops), so the answer is stable before the build runs; fully-DP curves
    are seed-free and can be cached once for every seed base.
    """
    if method == "exact":
        return False
    if method == "mc":
        return True
    horizon = max_length if lengths is None else max(int(L) for L in lengths)
    n = spec.grid_side
    return n * n * horizon > dp_cost_limit


def build_model(
    spec: GridworldSpec,
    rng: np.random.Generator,
    *,
    method: str = "auto",
    lengths: Sequence[int] | None = None,
    convergence_threshold: float = CONVERGENCE_THRESHOLD,
    max_length: int = MAX_CURVE_LENGTH,
    shot_cap: int = DEFAULT_SHOT_CAP,
    batch_size: int = BATCH_SIZE,
    min_successes: int = MIN_SUCCESSES,
    dp_cost_limit: int = DP_COST_LIMIT,
) -> FirstRewardModel:
    """Build a success curve plus its exact first-hit profile.

    With ``lengths=None`` the curve covers powers of two, stopping at the
    first estimate ≥ ``convergence_threshold`` or at ``max_length``.  An
    explicit ``lengths`` grid is computed in full.  ``method`` picks the
    estimator: "exact" (DP only), "mc" (sampling only), or "auto" (DP
    while grid_side²·L stays within ``dp_cost_limit``, MC beyond).
    """
    if method not in _POLICIES:
        raise ValueError(f"method must be one of {_POLICIES}, got {method!r}")
    if lengths is None:
        targets = _power_lengths(max_length)
        stop_on_convergence = True
    else:
        targets = sorted({int(L) for L in lengths})
        if not targets or targets[0] < 1:
            raise ValueError("explicit lengths must be a non-empty set of integers >= 1")
        stop_on_convergence = False

    n = spec.grid_side
    tx, ty = spec.target
    occ = np.zeros((n, n))
    occ[spec.start] = 1.0
    scratch = np.empty_like(occ)
    masses = np.zeros(1)
    dp_pos = 0

    points: list[CurvePoint] = []
    converged_at: int | None = None
    for L in targets:
        use_dp = method == "exact" or (method == "auto" and n * n * L <= dp_cost_limit)
        if use_dp:
            if L >= len(masses):
                masses = np.concatenate([masses, np.zeros(L + 1 - len(masses))])
            _kernels.dp_absorb(occ, scratch, tx, ty, masses, dp_pos + 1, L + 1)
            dp_pos = L
            estimate = min(float(masses[: L + 1].sum()), 1.0)
            point = CurvePoint(L=L, estimate=estimate, n_shots=0, n_success=0, method=METHOD_DP)
        else:
            point = estimate_mc(
                spec, L, rng, shot_cap, batch_size=batch_size, min_successes=min_successes
            )
        points.append(point)
        if converged_at is None and point.estimate >= convergence_threshold:
            converged_at = L
            if stop_on_convergence:
                break
    curve = SuccessCurve(spec, points, converged_at)
    # The hit-step profile is always exact: extend the DP to the curve's
    # last length (as far as the cost limit allows) even when the curve
    # estimates themselves came from sampling.
    last = points[-1].L if points else 0
    profile_to = last if method == "exact" else min(last, int(dp_cost_limit // (n * n)))
    if dp_pos < profile_to:
        if profile_to >= len(masses):
            masses = np.concatenate([masses, np.zeros(profile_to + 1 - len(masses))])
        _kernels.dp_absorb(occ, scratch, tx, ty, masses, dp_pos + 1, profile_to + 1)
        dp_pos = profile_to
    return FirstRewardModel(curve, masses[: dp_pos + 1])


def build_curve(
    spec: GridworldSpec,
    rng: np.random.Generator,
    *,
    method: str = "auto",
    **kwargs,
) -> SuccessCurve:
    """Success curve only; see build_model for parameters."""
    return build_model(spec, rng, method=method, **kwargs).curve


def interpolate_points(curve: SuccessCurve, lengths: Sequence[int]) -> list[CurvePoint]:
    """Linearly interpolated plot points, never used by strategies."""
    known = curve.lengths
    xs = np.array(known, dtype=float)
    ys = np.array([curve.points[L].estimate for L in known])
    out = []
    for L in lengths:
        if L in curve.points:
            out.append(curve.points[L])
            continue
        if not known[0] <= L <= known[-1]:
            raise ValueError(f"cannot interpolate outside [{known[0]}, {known[-1]}]")
        est = float(np.interp(float(L), xs, ys))
        out.append(
            CurvePoint(L=int(L), estimate=est, n_shots=0, n_success=0, method=METHOD_INTERPOLATED)
        )
    return out


def expected_first_passage(spec: GridworldSpec, *, tol: float = 1e-10) -> float:
    """Exact expected steps from start to target for the uniform walk.

    Solves the hitting-time system h(target) = 0,
    h(s) = 1 + mean_a h(step(s, a)) over the full grid (sparse direct
    solve) and verifies the residual against ``tol``.
    """
    n = spec.grid_side
    n_states = n * n
    x, y = np.divmod(np.arange(n_states), n)
    rows = []
    cols = []
    for dx, dy in ((0, 1), (0, -1), (-1, 0), (1, 0)):
        nx = np.clip(x + dx, 0, n - 1)
        ny = np.clip(y + dy, 0, n - 1)
        rows.append(np.arange(n_states))
        cols.append(nx * n + ny)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    target = spec.target[0] * n + spec.target[1]
    keep = (rows != target) & (cols != target)
    vals = np.full(keep.sum(), 0.25)
    transitions = sp.coo_matrix(
        (vals, (rows[keep], cols[keep])), shape=(n_states, n_states)
    ).tocsr()
    system = (sp.identity(n_states, format="csr") - transitions).tocsc()
    rhs = np.ones(n_states)
    rhs[target] = 0.0
    hitting = spla.spsolve(system, rhs)
    residual = float(np.abs(system @ hitting - rhs).max())
    if not np.isfinite(residual) or residual > tol:
        raise SolverError(
            f"hitting-time solve residual {residual:.3e} above tolerance {tol:.1e}"
        )
    sx, sy = spec.start
    return float(hitting[sx * n + sy])


def _lengths_digest(lengths: Sequence[int]) -> str:
    blob = ",".join(str(int(L)) for L in lengths).encode()
    return hashlib.sha256(blob).hexdigest()[:10]


class CurveStore:
    """On-disk cache of success curves and their first-hit profiles.

    Each curve is one self-describing JSON document plus an ``.npz``
    sidecar holding the exact first-hit profile.  Loads verify the full
    cache key (layout, method, batch size, stopping rule) and fail loudly
    on mismatch or corruption; writes are atomic replaces.
    """

    def __init__(self, cache_dir: str | Path) -> None:
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def path_for(
        self,
        spec: GridworldSpec,
        method: str = "auto",
        lengths: Sequence[int] | None = None,
        seed_base: int | None = None,
        max_length: int = MAX_CURVE_LENGTH,
        dp_cost_limit: int = DP_COST_LIMIT,
    ) -> Path:
        stem = f"curve_b{spec.base_size}_d{spec.wall_distance}_{method}"
        if lengths is not None:
            stem += f"_grid{_lengths_digest(sorted({int(L) for L in lengths}))}"
        # Sampled estimates are a function of the seed; keep realizations
        # from different seed bases apart.  Fully-DP curves are seed-free.
        if seed_base is not None and curve_consumes_rng(
            spec, method, lengths, max_length, dp_cost_limit
        ):
            stem += f"_s{seed_base}"
        return self.cache_dir / f"{stem}.json"

    @staticmethod
    def _sidecar(path: Path) -> Path:
        return path.with_suffix(".first_hit.npz")

    @staticmethod
    def _stopping_rule(
        lengths: Sequence[int] | None,
        convergence_threshold: float,
        max_length: int,
        shot_cap: int,
        min_successes: int,
        dp_cost_limit: int,
    ) -> dict:
        rule = {
            "kind": "powers_of_2" if lengths is None else "explicit",
            "convergence_threshold": convergence_threshold,
            "min_successes": min_successes,
            "shot_cap": shot_cap,
            "dp_cost_limit": dp_cost_limit,
        }
        if lengths is None:
            rule["max_length"] = max_length
        else:
            grid = sorted({int(L) for L in lengths})
            rule["n_lengths"] = len(grid)
            rule["lengths_digest"] = _lengths_digest(grid)
        return rule

    def store(
        self,
        model: FirstRewardModel,
        *,
        method: str = "auto",
        lengths: Sequence[int] | None = None,
        convergence_threshold: float = CONVERGENCE_THRESHOLD,
        max_length: int = MAX_CURVE_LENGTH,
        shot_cap: int = DEFAULT_SHOT_CAP,
        batch_size: int = BATCH_SIZE,
        min_successes: int = MIN_SUCCESSES,
        dp_cost_limit: int = DP_COST_LIMIT,
        seed_base: int | None = None,
    ) -> Path:
        curve = model.curve
        spec = curve.spec
        doc = {
            "format": CURVE_FORMAT,
            "b": spec.base_size,
            "d_wall": spec.wall_distance,
            "method": method,
            "batch_size": batch_size,
            "stopping_rule": self._stopping_rule(
                lengths, convergence_threshold, max_length, shot_cap, min_successes, dp_cost_limit
            ),
            "converged_at": curve.converged_at,
            "points": [
                {
                    "L": pt.L,
                    "estimate": pt.estimate,
                    "n_shots": pt.n_shots,
                    "n_success": pt.n_success,
                    "method": pt.method,
                }
                for pt in curve.points.values()
            ],
        }
        path = self.path_for(spec, method, lengths, seed_base, max_length, dp_cost_limit)
        self._atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
        sidecar = self._sidecar(path)
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".npz.tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                np.savez_compressed(fh, profile=model.profile)
            os.replace(tmp, sidecar)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def _atomic_write_text(self, path: Path, text: str) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".json.tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def load(
        self,
        spec: GridworldSpec,
        *,
        method: str = "auto",
        lengths: Sequence[int] | None = None,
        convergence_threshold: float = CONVERGENCE_THRESHOLD,
        max_length: int = MAX_CURVE_LENGTH,
        shot_cap: int = DEFAULT_SHOT_CAP,
        batch_size: int = BATCH_SIZE,
        min_successes: int = MIN_SUCCESSES,
        dp_cost_limit: int = DP_COST_LIMIT,
        seed_base: int | None = None,
    ) -> FirstRewardModel:
        path = self.path_for(spec, method, lengths, seed_base, max_length, dp_cost_limit)
        if not path.exists():
            raise CacheMissError(f"no cached curve at {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CacheCorruptError(f"unreadable cache file {path}: {exc}") from exc
        expected_key = {
            "format": CURVE_FORMAT,
            "b": spec.base_size,
            "d_wall": spec.wall_distance,
            "method": method,
            "batch_size": batch_size,
            "stopping_rule": self._stopping_rule(
                lengths, convergence_threshold, max_length, shot_cap, min_successes, dp_cost_limit
            ),
        }
        for field, want in expected_key.items():
            got = doc.get(field)
            if got != want:
                raise CacheKeyMismatchError(
                    f"cache file {path}: field {field!r} is {got!r}, expected {want!r}"
                )
        try:
            points = [
                CurvePoint(
                    L=int(raw["L"]),
                    estimate=float(raw["estimate"]),
                    n_shots=int(raw["n_shots"]),
                    n_success=int(raw["n_success"]),
                    method=str(raw["method"]),
                )
                for raw in doc["points"]
            ]
            converged_at = doc["converged_at"]
            curve = SuccessCurve(
                spec, points, None if converged_at is None else int(converged_at)
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheCorruptError(f"malformed cache file {path}: {exc}") from exc
        if lengths is not None:
            grid = sorted({int(L) for L in lengths})
            if curve.lengths != grid:
                raise CacheKeyMismatchError(
                    f"cache file {path}: stored grid differs from the requested lengths"
                )
        sidecar = self._sidecar(path)
        if not sidecar.exists():
            raise CacheMissError(f"missing first-hit sidecar {sidecar}")
        try:
            with np.load(sidecar) as payload:
                profile = payload["profile"]
        except Exception as exc:
            raise CacheCorruptError(f"unreadable first-hit sidecar {sidecar}: {exc}") from exc
        return FirstRewardModel(curve, profile)

    def load_or_build(
        self,
        spec: GridworldSpec,
        seed_base: int = 0,
        *,
        method: str = "auto",
        lengths: Sequence[int] | None = None,
        rebuild: bool = False,
        **params,
    ) -> tuple[FirstRewardModel, bool]:
        """Cached model if the key matches, else a fresh deterministic build.

        Returns (model, was_cached).  A key mismatch triggers a rebuild
        that overwrites the stale entry; corruption always raises.
        """
        if not rebuild:
            try:
                return (
                    self.load(
                        spec, method=method, lengths=lengths, seed_base=seed_base, **params
                    ),
                    True,
                )
            except (CacheMissError, CacheKeyMismatchError):
                pass
        stream = 0 if lengths is None else 1
        seq = curve_seed_sequence(seed_base, spec.base_size, spec.wall_distance, stream)
        model = build_model(
            spec, generator_from(seq), method=method, lengths=lengths, **params
        )
        self.store(model, method=method, lengths=lengths, seed_base=seed_base, **params)
        return model, False


def default_cache_dir() -> Path:
    """Cache location: env override, else a user-cache subdirectory."""
    env = os.environ.get("HYBRIDWALK_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME", os.path.join(os.path.expanduser("~"), ".cache"))
    return Path(base) / "hybridwalk"

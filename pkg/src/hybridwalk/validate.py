"""Fast self-checks: oracle equivalences, invariants, determinism.

Each check is independent and cheap (the whole suite runs in seconds);
``run_checks`` returns structured results so callers can render them or
map failures to an exit status.
"""

from __future__ import annotations

import json
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .aa import BoyerState, amplified_probability, sample_k
from .errors import CacheCorruptError
from .experiment import ExperimentConfig, run_sweep
from .gridworld import GridworldSpec, pinit_min_closed_form
from .pinit import CurveStore, build_model, expected_first_passage
from .reporting import emit_summary, emit_table

ATOL = 1e-12


def rotation_success_probability(p: float, k: int) -> float:
    """Success probability after k explicit 2-D Grover rotations.

    Reference implementation: iterate the rotation matrix on the
    (good, bad) amplitude pair instead of using the closed form.
    """
    theta = math.asin(math.sqrt(p))
    good, bad = math.sin(theta), math.cos(theta)
    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    for _ in range(k):
        good, bad = c * good + s * bad, -s * good + c * bad
    return good * good


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_closed_form_pinit() -> CheckResult:
    worst = 0.0
    for b in range(5, 10):
        spec = GridworldSpec(b, 0)
        L_min = spec.min_episode_length
        model = build_model(spec, np.random.default_rng(0), method="exact", lengths=[L_min])
        worst = max(worst, abs(model.p_init(L_min) - pinit_min_closed_form(spec)))
    ok = worst <= ATOL
    return CheckResult("dp_vs_closed_form", ok, f"max |dp - closed form| = {worst:.3e}")


def _check_aa_rotation() -> CheckResult:
    worst = 0.0
    for p in (0.0, 1e-9, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0):
        for k in (0, 1, 2, 3, 5, 8, 13, 40):
            worst = max(
                worst, abs(amplified_probability(p, k) - rotation_success_probability(p, k))
            )
    ok = worst <= ATOL
    return CheckResult("aa_vs_rotation", ok, f"max |closed form - rotation| = {worst:.3e}")


def _check_aa_identities() -> CheckResult:
    ps = np.linspace(0.0, 1.0, 101)
    k0 = all(amplified_probability(p, 0) == p for p in ps)
    bounded = all(0.0 <= amplified_probability(p, k) <= 1.0 for p in ps for k in range(7))
    ok = k0 and bounded
    return CheckResult("aa_identities", ok, f"k=0 identity: {k0}, range respected: {bounded}")


def _check_parity() -> CheckResult:
    bad: list[str] = []
    for b in (5, 7):
        for d in (0, 4, 8):
            spec = GridworldSpec(b, d)
            top = spec.min_episode_length + 2 * d - 1
            lengths = list(range(1, max(top, spec.min_episode_length) + 1))
            model = build_model(spec, np.random.default_rng(0), method="exact", lengths=lengths)
            for L in range(3, top + 1, 2):
                if abs(model.p_init(L) - model.p_init(L - 1)) > ATOL:
                    bad.append(f"(b={b}, d={d}, L={L})")
    return CheckResult(
        "odd_even_parity", not bad, "all odd L match L-1" if not bad else ", ".join(bad)
    )


def _check_first_passage() -> CheckResult:
    value = expected_first_passage(GridworldSpec(2, 0))
    ok = abs(value - 8.0) <= 1e-9
    return CheckResult("first_passage_b2", ok, f"expected_first_passage(2, 0) = {value!r}")


def _check_sample_k_support() -> CheckResult:
    rng = np.random.default_rng(12345)
    bad: list[str] = []
    for m, expect in ((1.0, {0}), (2.0, {0, 1}), (2.5, {0, 1}), (4.2, {0, 1, 2, 3})):
        state = BoyerState(L=16, m=m)
        seen = {sample_k(state, rng) for _ in range(2000)}
        if seen != expect:
            bad.append(f"m={m}: saw {sorted(seen)}, expected {sorted(expect)}")
    return CheckResult(
        "sample_k_support", not bad, "uniform support matches" if not bad else "; ".join(bad)
    )


def _check_determinism() -> CheckResult:
    config = ExperimentConfig(
        strategies=("hybrid", "prob-classical", "unrestricted"),
        base_sizes=(2, 3),
        wall_distances=(0,),
        n_runs=40,
        seed_base=11,
    )
    outputs = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            stats = run_sweep(config, cache_dir=tmp)
            outputs.append(emit_table(stats) + emit_summary(stats))
    ok = outputs[0] == outputs[1]
    return CheckResult(
        "seeded_determinism", ok, "repeat micro-sweep byte-identical" if ok else "outputs differ"
    )


def _check_cache_roundtrip() -> CheckResult:
    with tempfile.TemporaryDirectory() as tmp:
        store = CurveStore(tmp)
        spec = GridworldSpec(3, 0)
        built, was_cached = store.load_or_build(spec, 5, method="exact")
        again, hit = store.load_or_build(spec, 5, method="exact")
        ok = (
            not was_cached
            and hit
            and built.curve.lengths == again.curve.lengths
            and all(
                built.p_init(L) == again.p_init(L) for L in built.curve.lengths
            )
            and np.array_equal(built.profile, again.profile)
        )
        return CheckResult(
            "cache_roundtrip", ok, "store/load preserves curve and profile" if ok else "mismatch"
        )


def _check_cache_integrity(cache_dir: str | Path | None) -> CheckResult:
    if cache_dir is None:
        return CheckResult("cache_integrity", True, "no cache directory supplied")
    root = Path(cache_dir)
    if not root.is_dir():
        return CheckResult("cache_integrity", True, f"no cache directory at {root}")
    bad: list[str] = []
    n_seen = 0
    for path in sorted(root.glob("curve_*.json")):
        n_seen += 1
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            if not isinstance(doc, dict) or "format" not in doc or "points" not in doc:
                raise CacheCorruptError(f"cache file {path} lacks required keys")
            sidecar = path.with_suffix(".first_hit.npz")
            if sidecar.exists():
                with np.load(sidecar) as payload:
                    payload["profile"]
        except Exception as exc:  # noqa: BLE001 -- any unreadable entry is a finding
            bad.append(f"{path.name}: {exc}")
    if bad:
        return CheckResult("cache_integrity", False, "; ".join(bad))
    return CheckResult("cache_integrity", True, f"{n_seen} cache file(s) readable")


def run_checks(cache_dir: str | Path | None = None) -> list[CheckResult]:
    """Run the whole suite; always returns one result per check."""
    checks = [
        _check_closed_form_pinit(),
        _check_aa_rotation(),
        _check_aa_identities(),
        _check_parity(),
        _check_first_passage(),
        _check_sample_k_support(),
        _check_determinism(),
        _check_cache_roundtrip(),
        _check_cache_integrity(cache_dir),
    ]
    return checks

import numpy as np
import pytest

from hybridwalk.aa import amplified_probability
from hybridwalk.pinit import CurveStore
from hybridwalk.gridworld import GridworldSpec
from hybridwalk.validate import rotation_success_probability, run_checks


def test_rotation_oracle_basics():
    # No iterations: the rotation leaves the initial overlap untouched.
    assert rotation_success_probability(0.3, 0) == pytest.approx(0.3, abs=1e-15)
    # One iteration from p=1/4 rotates exactly onto the good state.
    assert rotation_success_probability(0.25, 1) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 1e-4, 0.1, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("k", [0, 1, 2, 7, 19])
def test_rotation_matches_closed_form(p, k):
    assert rotation_success_probability(p, k) == pytest.approx(
        amplified_probability(p, k), abs=1e-12
    )


def test_run_checks_all_pass(tmp_path):
    checks = run_checks(str(tmp_path))
    names = [c.name for c in checks]
    assert names == [
        "dp_vs_closed_form",
        "aa_vs_rotation",
        "aa_identities",
        "odd_even_parity",
        "first_passage_b2",
        "sample_k_support",
        "seeded_determinism",
        "cache_roundtrip",
        "cache_integrity",
    ]
    for check in checks:
        assert check.passed, f"{check.name}: {check.detail}"


def test_cache_integrity_names_the_corrupt_file(tmp_path):
    store = CurveStore(tmp_path)
    store.load_or_build(GridworldSpec(2, 0), 0, method="exact", lengths=[2, 4])
    victim = next(tmp_path.glob("curve_*.json"))
    victim.write_text("{broken", encoding="utf-8")
    (check,) = [c for c in run_checks(str(tmp_path)) if c.name == "cache_integrity"]
    assert not check.passed
    assert victim.name in check.detail

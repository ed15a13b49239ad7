import json

import pytest
from fastapi.testclient import TestClient

from hybridwalk import __version__
from hybridwalk.errors import (
    CacheCorruptError,
    CacheKeyMismatchError,
    CacheMissError,
    ConfigError,
    RoundCapError,
    SolverError,
)
from hybridwalk.service import create_app, status_for_error

SMALL_CONFIG = {
    "strategies": ["hybrid", "prob-classical", "unrestricted"],
    "base_sizes": [2, 3],
    "wall_distances": [0],
    "n_runs": 40,
    "seed_base": 11,
}


@pytest.fixture()
def client(tmp_path):
    app = create_app(cache_dir=str(tmp_path), max_workers=1)
    with TestClient(app) as c:
        yield c


def test_health(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "version": __version__}


def test_pinit_builds_then_hits_cache(client):
    req = {"base_size": 3, "wall_distance": 0, "method": "exact", "lengths": [4, 8, 16]}
    first = client.post("/pinit", json=req)
    assert first.status_code == 200
    body = first.json()
    assert body["n_points"] == 3
    assert not body["was_cached"]
    assert body["capped_lengths"] == []
    (payload,) = body["files"]
    assert payload["name"] == "pinit_b3_d0.csv"
    assert payload["content"].splitlines()[1] == "L,value,error,method"
    again = client.post("/pinit", json=req).json()
    assert again["was_cached"]
    assert again["files"] == body["files"]


def test_run_returns_stats_and_histogram(client):
    req = {"strategy": "hybrid", "base_size": 3, "n_runs": 50, "seed_base": 7}
    body = client.post("/run", json=req)
    assert body.status_code == 200
    doc = body.json()
    stats = doc["stats"]
    assert stats["strategy"] == "probabilistic_hybrid"
    assert stats["n_runs"] == 50 and stats["n_errors"] == 0
    assert stats["mean_n_act"] > 0
    names = {f["name"] for f in doc["files"]}
    assert names == {"summary.json", "hist_probabilistic_hybrid_b3_d0.csv"}


def test_run_fixed_strategy_requires_length(client):
    missing = client.post("/run", json={"strategy": "fixed-hybrid", "base_size": 3})
    assert missing.status_code == 400
    assert missing.json()["error"] == "ConfigError"
    ok = client.post(
        "/run",
        json={"strategy": "fixed-hybrid", "base_size": 3, "fixed_L": 8, "n_runs": 30},
    )
    assert ok.status_code == 200
    assert ok.json()["stats"]["fixed_L"] == 8


def test_run_with_all_failures_reports_null_mean(client):
    req = {
        "strategy": "unrestricted",
        "base_size": 3,
        "n_runs": 10,
        "caps": {"step_cap": 2},
    }
    doc = client.post("/run", json=req).json()
    assert doc["stats"]["mean_n_act"] is None
    assert doc["stats"]["n_errors"] == 10
    assert {f["name"] for f in doc["files"]} == {"summary.json"}


def test_sweep_emits_stable_artifacts(client):
    req = {"config": SMALL_CONFIG}
    first = client.post("/sweep", json=req)
    assert first.status_code == 200
    doc = first.json()
    names = [f["name"] for f in doc["files"]]
    assert names[0] == "table.csv" and names[1] == "summary.json"
    assert len(names) == 2 + 6  # one histogram per cell
    assert len(doc["stats"]) == 6
    # Identical request, byte-identical artifacts.
    second = client.post("/sweep", json=req).json()
    assert second["files"] == doc["files"]
    table = doc["files"][0]["content"]
    assert table.splitlines()[0].startswith("d_wall,strategy,b,")


def test_sweep_no_build_needs_a_warm_cache(client):
    cold = client.post("/sweep", json={"config": SMALL_CONFIG, "no_build": True})
    assert cold.status_code == 404
    assert cold.json()["error"] == "CacheMissError"
    assert client.post("/sweep", json={"config": SMALL_CONFIG}).status_code == 200
    warm = client.post("/sweep", json={"config": SMALL_CONFIG, "no_build": True})
    assert warm.status_code == 200


def test_sweep_rejects_unknown_strategy(client):
    bad = {**SMALL_CONFIG, "strategies": ["quantum"]}
    resp = client.post("/sweep", json={"config": bad})
    assert resp.status_code == 400
    assert "unknown strategy" in resp.json()["detail"]


def test_request_schema_is_strict(client):
    resp = client.post("/sweep", json={"config": SMALL_CONFIG, "no_buidl": True})
    assert resp.status_code == 422  # pydantic rejects unknown fields


def test_fixed_sweep_series(client):
    req = {
        "base_size": 3,
        "wall_distance": 0,
        "strategies": ["fixed-hybrid", "fixed-classical"],
        "grid": [2, 4, 8],
        "n_runs": 30,
        "seed_base": 5,
    }
    doc = client.post("/fixed-sweep", json=req)
    assert doc.status_code == 200
    body = doc.json()
    assert set(body["series"]) == {"fixed_hybrid", "fixed_classical"}
    for points in body["series"].values():
        assert [p["L"] for p in points] == [2, 4, 8]
        unreachable = points[0]
        assert unreachable["mean_n_act"] is None and unreachable["n_errors"] == 30
    names = {f["name"] for f in body["files"]}
    assert names == {"fixed_fixed_hybrid_b3_d0.csv", "fixed_fixed_classical_b3_d0.csv"}


def test_fixed_sweep_rejects_probabilistic_strategies(client):
    resp = client.post("/fixed-sweep", json={"strategies": ["hybrid"], "n_runs": 5})
    assert resp.status_code == 400


def test_table_and_hist_are_stateless_transforms(client):
    sweep = client.post("/sweep", json={"config": SMALL_CONFIG}).json()
    summary = next(f for f in sweep["files"] if f["name"] == "summary.json")["content"]
    table = client.post("/table", json={"summary": summary})
    assert table.status_code == 200
    (payload,) = table.json()["files"]
    assert payload == next(f for f in sweep["files"] if f["name"] == "table.csv")

    hist = client.post(
        "/hist",
        json={"summary": summary, "strategy": "hybrid", "base_size": 3,
              "wall_distance": 0},
    )
    assert hist.status_code == 200
    (payload,) = hist.json()["files"]
    assert payload["name"] == "hist_probabilistic_hybrid_b3_d0.csv"
    missing = client.post(
        "/hist",
        json={"summary": summary, "strategy": "hybrid", "base_size": 9,
              "wall_distance": 0},
    )
    assert missing.status_code == 400


def test_table_rejects_malformed_summary(client):
    resp = client.post("/table", json={"summary": "not json"})
    assert resp.status_code == 400


def test_validate_endpoint_runs_checks(client):
    doc = client.post("/validate", json={})
    assert doc.status_code == 200
    body = doc.json()
    assert body["ok"] is True
    names = {c["name"] for c in body["checks"]}
    assert "aa_vs_rotation" in names and "seeded_determinism" in names
    assert all(c["passed"] for c in body["checks"])


def test_status_mapping_orders_specific_before_generic():
    assert status_for_error(ConfigError("x")) == 400
    assert status_for_error(RoundCapError("x")) == 422
    assert status_for_error(CacheMissError("x")) == 404
    assert status_for_error(CacheCorruptError("x")) == 409
    assert status_for_error(CacheKeyMismatchError("x")) == 409
    assert status_for_error(SolverError("x")) == 500

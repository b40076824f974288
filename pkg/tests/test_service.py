"""HTTP surface: payload validation, determinism, error mapping."""

import pytest
from fastapi.testclient import TestClient

from turfbbn.core import Evidence
from turfbbn.infer import exact_query, reverse_query
from turfbbn.service import create_app, load_app

GOOD_EVENT = [{"var": "illegal_proportion",
               "states": ["le_0.15", "0.15_to_0.31"]}]
GOOD_EVIDENCE = [{"var": "iaoa", "states": ["high", "very_high"]}]


@pytest.fixture(scope="module")
def client(fishery_artifacts):
    app = create_app(fishery_artifacts["network"])
    return TestClient(app, raise_server_exceptions=False)


class TestNetworkEndpoint:
    def test_shape(self, client, fishery_artifacts):
        body = client.get("/network").json()
        names = [v["name"] for v in body["variables"]]
        assert len(names) == 9
        assert body["response_variables"] == ["illegal_proportion",
                                              "relative_size"]
        network = fishery_artifacts["network"]
        assert {(e["parent"], e["child"]) for e in body["edges"]} \
            == set(network.dag.edges)
        for v in body["variables"]:
            assert v["states"]
            assert v["kind"] in ("ordinal", "nominal")


class TestQueryEndpoint:
    def test_basic_query(self, client):
        resp = client.post("/query", json={
            "evidence": GOOD_EVIDENCE, "event": GOOD_EVENT,
            "n_samples": 2000, "seed": 1,
        })
        assert resp.status_code == 200
        body = resp.json()
        assert 0.0 <= body["ci_low"] <= body["estimate"] <= body["ci_high"] <= 1.0
        assert body["method"] == "likelihood_weighting"
        assert body["n_samples"] == 2000
        assert body["exact"] is not None
        assert abs(body["estimate"] - body["exact"]) < 0.1

    def test_exact_field_matches_direct_call(self, client, fishery_artifacts):
        resp = client.post("/query", json={
            "evidence": GOOD_EVIDENCE, "event": GOOD_EVENT, "seed": 3,
        })
        want = exact_query(
            fishery_artifacts["network"],
            Evidence.of(illegal_proportion=["le_0.15", "0.15_to_0.31"]),
            Evidence.of(iaoa=["high", "very_high"]),
        ).estimate
        assert resp.json()["exact"] == pytest.approx(want, abs=1e-12)

    def test_identical_payloads_identical_answers(self, client):
        payload = {"evidence": GOOD_EVIDENCE, "event": GOOD_EVENT, "seed": 11}
        first = client.post("/query", json=payload).json()
        second = client.post("/query", json=payload).json()
        assert first == second

    def test_seed_changes_the_sampled_estimate(self, client):
        a = client.post("/query", json={"event": GOOD_EVENT, "seed": 1}).json()
        b = client.post("/query", json={"event": GOOD_EVENT, "seed": 2}).json()
        assert a["estimate"] != b["estimate"]
        assert a["exact"] == b["exact"]

    def test_unknown_variable_is_400_with_field(self, client):
        resp = client.post("/query", json={
            "event": [{"var": "salinity", "states": ["high"]}],
        })
        assert resp.status_code == 400
        errors = resp.json()["errors"]
        assert any("salinity" in e["message"] for e in errors)

    def test_unknown_state_is_400(self, client):
        resp = client.post("/query", json={
            "event": [{"var": "iaoa", "states": ["enormous"]}],
        })
        assert resp.status_code == 400

    def test_extra_field_is_400_with_path(self, client):
        resp = client.post("/query", json={
            "event": GOOD_EVENT, "confidence": 0.95,
        })
        assert resp.status_code == 400
        assert any("confidence" in e["field"] for e in resp.json()["errors"])

    def test_empty_event_is_400(self, client):
        resp = client.post("/query", json={"event": []})
        assert resp.status_code == 400

    def test_zero_samples_is_400(self, client):
        resp = client.post("/query", json={"event": GOOD_EVENT, "n_samples": 0})
        assert resp.status_code == 400

    def test_duplicate_clause_is_400(self, client):
        resp = client.post("/query", json={
            "event": [{"var": "iaoa", "states": ["low"]},
                      {"var": "iaoa", "states": ["high"]}],
        })
        assert resp.status_code == 400
        assert "event[1].var" in resp.json()["errors"][0]["field"]

    def test_contradictory_query_is_422(self, client):
        resp = client.post("/query", json={
            "evidence": [{"var": "iaoa", "states": ["low"]}],
            "event": [{"var": "iaoa", "states": ["high"]}],
        })
        assert resp.status_code == 422


class TestReverseEndpoint:
    def test_distribution_sums_to_one(self, client, fishery_artifacts):
        resp = client.post("/reverse", json={
            "driver": "iaoa", "event": GOOD_EVENT,
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["driver"] == "iaoa"
        assert sum(body["distribution"].values()) == pytest.approx(1.0, abs=1e-9)
        want = reverse_query(
            fishery_artifacts["network"], "iaoa",
            Evidence.of(illegal_proportion=["le_0.15", "0.15_to_0.31"]))
        for state, p in want.items():
            assert body["distribution"][state] == pytest.approx(p, abs=1e-12)

    def test_driver_inside_event_is_422(self, client):
        resp = client.post("/reverse", json={
            "driver": "illegal_proportion", "event": GOOD_EVENT,
        })
        assert resp.status_code == 422

    def test_unknown_driver_is_400(self, client):
        resp = client.post("/reverse", json={
            "driver": "salinity", "event": GOOD_EVENT,
        })
        assert resp.status_code == 400


class TestScenarioEndpoint:
    def test_seven_presets(self, client):
        body = client.get("/scenarios").json()
        presets = body["scenarios"]
        assert [p["name"] for p in presets] == [f"Sce. {i}" for i in range(1, 8)]
        for p in presets:
            assert p["n_samples"] == 2000
            assert p["event"]
            for clause in p["evidence"] + p["event"]:
                assert clause["states"] == sorted(clause["states"])

    def test_presets_are_valid_query_payloads(self, client):
        presets = client.get("/scenarios").json()["scenarios"]
        first = presets[0]
        resp = client.post("/query", json={
            "evidence": first["evidence"], "event": first["event"],
            "seed": first["seed"], "n_samples": 200,
        })
        assert resp.status_code == 200


class TestLoadApp:
    def test_from_serialized_document(self, fishery_artifacts, tmp_path):
        from turfbbn.netdoc import serialize_network

        path = tmp_path / "net.json"
        path.write_text(serialize_network(fishery_artifacts["network"]),
                        encoding="utf-8")
        app = load_app(path, default_samples=300, default_seed=4)
        with TestClient(app) as local:
            body = local.post("/query", json={"event": GOOD_EVENT}).json()
            assert body["n_samples"] == 300

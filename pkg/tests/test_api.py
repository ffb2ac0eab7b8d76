import json

import pytest
from fastapi.testclient import TestClient

from main import app
from services.model_service import model_service


@pytest.fixture
def client():
    return TestClient(app)


def test_root_lists_the_endpoints(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["endpoints"]["betti"] == "/api/betti"


def test_system_status(client):
    response = client.get("/api/test")
    assert response.status_code == 200
    assert response.json()["status"] == "online"
    assert client.get("/health").json()["status"] == "healthy"


def test_builtins(client):
    body = client.get("/api/builtins").json()
    assert body["total"] == 11
    assert {"name": "CP2", "dimension": 4, "has_sullivan": True} in body["builtins"]


def test_validate_upload(client, s2):
    files = {"file": ("S2.pd.json", model_service.dumps(s2.pd).encode("utf-8"), "application/json")}
    response = client.post("/api/validate", files=files)
    assert response.status_code == 200
    assert response.json() == {"model": "S2", "kind": "pd-cdga", "valid": True, "violations": []}


def test_validate_reports_violations_in_the_body(client):
    text = json.dumps({"name": "S1", "kind": "sullivan", "generators": [{"name": "t", "degree": 1}]})
    response = client.post("/api/validate", files={"file": ("S1.json", text.encode("utf-8"), "application/json")})
    assert response.status_code == 200
    body = response.json()
    assert not body["valid"]
    assert body["violations"][0]["axiom"] == "1-connected"


def test_validate_rejects_broken_json(client):
    response = client.post("/api/validate", files={"file": ("bad.json", b"{\"name\": ", "application/json")})
    assert response.status_code == 422
    assert "invalid JSON" in response.json()["detail"]


def test_betti_both_pipelines(client):
    response = client.post("/api/betti", json={"builtin": "S2", "max_degree": 4, "pipeline": "both"})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert [(r["hochschild"], r["sullivan"], r["match"]) for r in rows] == [(1, 1, True)] * 5


def test_betti_of_an_inline_model(client, cp2):
    model = json.loads(model_service.dumps(cp2.pd))
    response = client.post("/api/betti", json={"model": model, "max_degree": 4})
    assert response.status_code == 200
    assert [r["hochschild"] for r in response.json()["rows"]] == [1, 1, 1, 1, 1]


def test_loop_tables(client):
    response = client.post("/api/loop", json={"builtin": "S3", "max_degree": 5})
    assert response.status_code == 200
    body = response.json()
    assert body["dimension"] == 3
    assert body["basis"]["-3"] == ["L-3#0"]
    assert list(body["unit"]) == ["L0#0"]


def test_hodge(client):
    response = client.post("/api/hodge", json={"builtin": "S3", "max_degree": 6})
    assert response.status_code == 200
    body = response.json()
    assert body["weights"] == [0, 1, 2, 3]
    assert body["rows"][6] == {"degree": 6, "dims": [0, 0, 0, 1], "sum": 1, "total": 1}


def test_check(client):
    response = client.post("/api/check", json={"builtin": "S3", "max_degree": 4})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"], [r for r in body["reports"] if not r["passed"]]


def test_unknown_builtin_is_404(client):
    response = client.post("/api/betti", json={"builtin": "RP2"})
    assert response.status_code == 404


def test_degree_limit_is_400(client):
    response = client.post("/api/betti", json={"builtin": "S2", "max_degree": 40})
    assert response.status_code == 400
    assert "exceeds the server limit" in response.json()["detail"]


def test_loop_below_the_dimension_is_400(client):
    response = client.post("/api/loop", json={"builtin": "CP2", "max_degree": 2})
    assert response.status_code == 400


def test_invalid_inline_model_is_422(client):
    model = {
        "name": "S1",
        "kind": "pd-cdga",
        "basis": [{"label": "1", "degree": 0}, {"label": "t", "degree": 1}],
        "unit": "1",
        "dimension": 1,
        "orientation": {"t": "1"},
    }
    response = client.post("/api/betti", json={"model": model, "max_degree": 3})
    assert response.status_code == 422
    assert "1-connected input required" in response.json()["detail"]


def test_request_needs_one_source(client):
    assert client.post("/api/betti", json={"max_degree": 3}).status_code == 422


def test_inline_sullivan_model_defaults_to_the_sullivan_pipeline(client, s2):
    model = json.loads(model_service.dumps(s2.sullivan))
    response = client.post("/api/betti", json={"model": model, "max_degree": 4})
    assert response.status_code == 200
    body = response.json()
    assert body["pipeline"] == "sullivan"
    assert [(r["hochschild"], r["sullivan"]) for r in body["rows"]] == [(None, 1)] * 5


def test_sullivan_slot_rejects_a_pd_model(client, s2):
    model = json.loads(model_service.dumps(s2.pd))
    response = client.post("/api/betti", json={"model": model, "sullivan": model, "max_degree": 3})
    assert response.status_code == 422
    assert "sullivan slot" in response.json()["detail"]


def test_unhandled_errors_return_the_error_body(monkeypatch):
    def broken():
        raise RuntimeError("builtin registry unavailable")

    monkeypatch.setattr(model_service, "builtin_names", broken)
    response = TestClient(app, raise_server_exceptions=False).get("/api/builtins")
    assert response.status_code == 500
    body = response.json()
    assert body["error"] == "Internal Server Error"
    assert body["message"]
    assert body["timestamp"]

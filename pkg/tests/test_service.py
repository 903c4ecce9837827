import math

import pytest
from fastapi.testclient import TestClient

from ehlink.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["version"]


def test_capacity_endpoint(client):
    body = client.get("/capacity", params={"p": 3.0}).json()
    assert body["capacity_bits"] == 1.0
    assert client.get("/capacity", params={"p": -1.0}).status_code == 422


def test_allocate_endpoint(client):
    resp = client.post("/allocate", json={"p_in": [3.0, 1.0, 2.0]})
    assert resp.status_code == 200
    body = resp.json()
    assert body["powers"] == [2.0, 2.0, 2.0]
    assert body["breakpoints"] == [0, 3]
    assert body["t_opt"] == pytest.approx(0.5 * math.log2(3.0))
    assert body["t_lb"] <= body["t_opt"] <= body["t_ub"]
    rows = body["rows"]
    assert [r["slot"] for r in rows] == [1, 2, 3]
    assert rows[2]["cum_tr"] == pytest.approx(rows[2]["cum_in"])


def test_allocate_validation(client):
    assert client.post("/allocate", json={"p_in": []}).status_code == 422
    assert client.post("/allocate", json={"p_in": [1.0, -2.0]}).status_code == 400
    assert client.post("/allocate", json={}).status_code == 422


def test_trace_endpoint_deterministic(client):
    req = {"spec": {"distribution": "exponential", "mean": 10.0}, "n": 32, "seed": 5}
    a = client.post("/trace", json=req).json()
    b = client.post("/trace", json=req).json()
    assert a["energies"] == b["energies"]
    assert len(a["energies"]) == 32
    assert a["mean"] == pytest.approx(sum(a["energies"]) / 32)


def test_trace_endpoint_constant(client):
    req = {"spec": {"distribution": "constant", "mean": 4.0}, "n": 3}
    body = client.post("/trace", json=req).json()
    assert body["energies"] == [4.0, 4.0, 4.0]


def test_trace_endpoint_rejects_bad_spec(client):
    req = {"spec": {"distribution": "uniform", "mean": 1.0, "half_width": 5.0}, "n": 3}
    assert client.post("/trace", json=req).status_code == 422


def test_simulate_sat(client):
    req = {"scheme": "sat", "n": 512, "p": 10.0, "m": 8, "trials": 20, "seed": 1}
    body = client.post("/simulate", json=req).json()
    assert body["scheme"] == "sat"
    assert body["h"] == 108
    assert body["var"] == 10.0
    assert body["violation_rate"] is not None
    assert body["second_half_infeasible_rate"] is None
    assert len(body["outcomes"]) == 20
    assert [row["trial"] for row in body["outcomes"]] == list(range(20))
    row = body["outcomes"][0]
    assert row["error"] == (row["msg"] != row["decoded"])


def test_simulate_bet(client):
    req = {"scheme": "bet", "n": 512, "p": 10.0, "trials": 20, "seed": 1}
    body = client.post("/simulate", json=req).json()
    assert body["var"] == pytest.approx(9.0)
    assert body["h"] == 0
    assert body["violation_rate"] is None
    assert 0.0 <= body["second_half_infeasible_rate"] <= 1.0


def test_simulate_deterministic(client):
    req = {"scheme": "bet", "n": 256, "p": 10.0, "trials": 10, "seed": 3}
    a = client.post("/simulate", json=req).json()
    b = client.post("/simulate", json=req).json()
    assert a == b


def test_simulate_validation(client):
    assert client.post("/simulate", json={"scheme": "sat", "n": 0, "p": 1.0}).status_code == 422
    assert client.post("/simulate", json={"scheme": "xx", "n": 8, "p": 1.0}).status_code == 422
    req = {"scheme": "bet", "n": 8, "p": 1.0, "eps": 2.0}
    assert client.post("/simulate", json=req).status_code == 422


def test_simulate_codebook_budget(client):
    req = {"scheme": "sat", "n": 2 ** 20, "p": 1.0, "m": 64, "trials": 1}
    assert client.post("/simulate", json=req).status_code == 413


def test_fig5_endpoint(client):
    req = {"mean": 10.0, "std_values": [0.0, 5.0], "trials": 15, "base_seed": 4}
    body = client.post("/sweep/fig5", json=req).json()
    assert len(body["points"]) == 2
    zero = body["points"][0]
    assert zero["t_lb_mean"] == zero["t_opt_mean"] == zero["t_ub_mean"]
    assert body["meta"]["kind"] == "fig5"


def test_feasibility_endpoint(client):
    req = {"scheme": "sat", "p": 10.0, "n_values": [256, 1024], "trials": 10}
    body = client.post("/sweep/feasibility", json=req).json()
    assert [pt["n"] for pt in body["points"]] == [256, 1024]
    assert all(0.0 <= pt["violation_rate"] <= 1.0 for pt in body["points"])
    assert body["meta"]["kind"] == "feasibility"


def test_unknown_fields_rejected(client):
    req = {"p_in": [1.0], "bogus": 1}
    assert client.post("/allocate", json=req).status_code == 422

from fastapi.testclient import TestClient

from app.main import app
from app.services.netlist import format_netlist

client = TestClient(app)
PREFIX = "/api/v1"


def test_health():
    assert client.get("/health").json() == {"status": "ok"}


def test_compile_then_run(formula):
    response = client.post(f"{PREFIX}/compile", json={"netlist": format_netlist(formula)})
    assert response.status_code == 200
    body = response.json()
    assert body["report"]["step_count"] == 5
    assert body["report"]["within_bounds"] is True

    run = client.post(f"{PREFIX}/run", json={"program": body["program"], "bits": "1001"})
    assert run.status_code == 200
    assert run.json()["ok"] is True
    assert run.json()["outputs"] == [0]
    assert "x-request-id" in run.headers


def test_verify_endpoint(fanout_and):
    response = client.post(
        f"{PREFIX}/verify",
        json={"netlist": format_netlist(fanout_and), "backend": "catalyst", "seeds": [0, 1]},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["failed"] == 0
    assert body["checked"] == 8


def test_verify_endpoint_defaults_to_the_configured_seed_count(sample, override_settings):
    netlist = format_netlist(sample("single_and.net"))
    body = client.post(f"{PREFIX}/verify", json={"netlist": netlist}).json()
    assert body["checked"] == 4 * 25
    override_settings(default_seed_count=3)
    body = client.post(f"{PREFIX}/verify", json={"netlist": netlist}).json()
    assert body["checked"] == 4 * 3
    assert body["failed"] == 0


def test_lowerbound_endpoint():
    rows = client.get(f"{PREFIX}/lowerbound", params={"max_depth": 3}).json()
    assert [row["depth"] for row in rows] == [1, 2, 3]
    assert all(row["passed"] for row in rows)
    assert client.get(f"{PREFIX}/lowerbound", params={"max_depth": 0}).status_code == 422


def test_toolchain_errors_become_422():
    response = client.post(f"{PREFIX}/compile", json={"netlist": "gate 1 INPUT\ngate 2 NOT 1 1\noutputs 2\n"})
    assert response.status_code == 422
    assert response.json()["ok"] is False
    assert "NOT gate 2" in response.json()["error"]

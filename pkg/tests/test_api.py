import io
import json

import numpy as np
import pandas as pd
import pytest
from fastapi.testclient import TestClient

from focir import __version__
from focir.main import app

SINGLE_CPE = {"ts": 1.0, "r_inf": 0.05, "branches": [{"r": 0.02, "c": 50.0, "alpha": 0.6}]}
TWO_CPE = {
    "ts": 1.0,
    "r_inf": 0.01,
    "branches": [{"r": 0.02, "c": 100.0, "alpha": 0.4}, {"r": 0.05, "c": 500.0, "alpha": 0.8}],
}
RANDLES = {"ts": 0.1, "r_inf": 0.1, "branches": [{"r": 1.0, "c": 1.0, "alpha": 1.0}]}


@pytest.fixture
def client():
    with TestClient(app) as test_client:
        yield test_client


def _csv(current, ts):
    buffer = io.StringIO()
    pd.DataFrame({"time": np.arange(len(current)) * ts, "current": current}).to_csv(buffer, index=False)
    return buffer.getvalue().encode()


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy", "version": __version__}


def test_simulate_returns_csv_trace(client):
    response = client.post(
        "/api/simulate",
        data={"model": json.dumps(RANDLES)},
        files={"signal": ("signal.csv", _csv(np.ones(100), 0.1), "text/csv")},
    )
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/csv")
    trace = pd.read_csv(io.StringIO(response.text))
    assert list(trace.columns) == ["time", "current", "voltage"]
    assert trace["voltage"].iloc[-1] == pytest.approx(1.1, rel=1e-4)


def test_simulate_rejects_sampling_mismatch(client):
    response = client.post(
        "/api/simulate",
        data={"model": json.dumps(RANDLES)},
        files={"signal": ("signal.csv", _csv(np.ones(10), 0.2), "text/csv")},
    )
    assert response.status_code == 400
    assert "Non-uniform sampling" in response.json()["detail"]


def test_simulate_rejects_bad_model(client):
    response = client.post(
        "/api/simulate",
        data={"model": "{not json"},
        files={"signal": ("signal.csv", _csv(np.ones(10), 0.1), "text/csv")},
    )
    assert response.status_code == 400


def test_coeffs(client):
    response = client.post("/api/coeffs", json={"model": SINGLE_CPE, "horizon": 12})
    assert response.status_code == 200
    document = response.json()
    assert document["structure"] == "single_cpe"
    assert len(document["f"]) == 14
    assert len(document["g"]) == 13


def test_coeffs_schema_violation(client):
    response = client.post("/api/coeffs", json={"model": SINGLE_CPE, "horizon": 1})
    assert response.status_code == 400


def test_identify_two_cpe(client):
    coeffs = client.post("/api/coeffs", json={"model": TWO_CPE, "horizon": 10}).json()
    response = client.post("/api/identify", json=coeffs)
    assert response.status_code == 200
    report = response.json()
    assert report["classification"] == "identifiable(2)"
    assert len(report["solutions"]) == 2


def test_identify_randles(client):
    coeffs = client.post("/api/coeffs", json={"model": RANDLES, "horizon": 10}).json()
    report = client.post("/api/identify", json=coeffs).json()
    assert report["structure"] == "randles"
    assert report["solutions"][0]["theta"] == pytest.approx([0.1, 1.0, 1.0], rel=1e-12)


def test_identify_inconsistent_coefficients(client):
    coeffs = client.post("/api/coeffs", json={"model": SINGLE_CPE, "horizon": 10}).json()
    coeffs["g"][0] *= 1.01
    response = client.post("/api/identify", json=coeffs)
    assert response.status_code == 422
    assert "NotSingleCpeStructureError" in response.json()["detail"]


def test_roundtrip(client):
    response = client.post("/api/roundtrip", json={"model": TWO_CPE, "horizon": 10})
    assert response.status_code == 200
    report = response.json()
    assert report["passed"] is True
    assert report["truth_in_solutions"] is True
    assert report["classification"] == "identifiable(2)"


def test_roundtrip_reports_failure(client):
    response = client.post("/api/roundtrip", json={"model": TWO_CPE, "horizon": 10, "tol": 1e-300})
    assert response.status_code == 200
    assert response.json()["passed"] is False

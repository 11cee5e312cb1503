import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.prefgen.service import build_folklore_original


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture
def folklore_body(folklore3):
    return folklore3.model_dump(mode="json")


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_root_lists_services(client):
    assert set(client.get("/").json()["services"]) == {"core", "prefgen", "algorithms", "oracle", "experiments"}


class TestCore:
    def test_validate(self, client, folklore_body):
        body = client.post("/api/core/validate", json=folklore_body).json()
        assert body["success"] is True
        assert body["data"]["ok"] is True

    def test_validate_reports_violations(self, client):
        body = client.post("/api/core/validate", json={"men": [[0, 0]], "women": [[0]]}).json()
        assert body["data"]["ok"] is False

    def test_solve(self, client, folklore_body):
        body = client.post("/api/core/solve", json={"instance": folklore_body, "side": "woman"}).json()
        assert body["data"]["matching"]["men"] == [0, 1, 2]

    def test_solve_invalid_instance(self, client):
        response = client.post("/api/core/solve", json={"instance": {"men": [[4]], "women": [[0]]}})
        assert response.status_code == 422
        body = response.json()
        assert body["success"] is False
        assert "Invalid instance" in body["error"]
        assert body["code"] == "invalid_instance"

    def test_malformed_body(self, client):
        assert client.post("/api/core/solve", json={"instance": {"men": "x"}}).status_code == 422


class TestPrefgen:
    def test_generate(self, client):
        descriptor = {"model": "swap", "M": 4, "W": 4, "seed": 2}
        body = client.post("/api/prefgen/generate", json=descriptor).json()
        assert body["data"]["descriptor"]["model"] == "swap"
        assert len(body["data"]["instance"]["men"]) == 4

    def test_generate_needs_seed(self, client):
        response = client.post("/api/prefgen/generate", json={"model": "uniform", "M": 3, "W": 3})
        assert response.status_code == 422
        assert "seed" in response.json()["error"]


class TestAlgorithms:
    def test_enumerate(self, client):
        instance = build_folklore_original(4).instance.model_dump(mode="json")
        body = client.post("/api/algorithms/enumerate", json={"instance": instance, "woman": 0}).json()
        assert body["data"]["husbands"] == [3, 2, 1, 0]

    def test_enumerate_weights_need_seed(self, client, folklore_body):
        payload = {"instance": folklore_body, "woman": 0, "weights": {"0": 1.0, "1": 2.0, "2": 3.0}}
        assert client.post("/api/algorithms/enumerate", json=payload).status_code == 422
        payload["seed"] = 4
        body = client.post("/api/algorithms/enumerate", json=payload).json()
        assert sorted(body["data"]["order"]) == [0, 1, 2]

    def test_enumerate_weights_naming_missing_men(self, client, folklore_body):
        payload = {"instance": folklore_body, "woman": 0, "weights": {"0": 1, "1": 1, "9": 5}, "seed": 1}
        response = client.post("/api/algorithms/enumerate", json=payload)
        assert response.status_code == 422
        assert response.json()["code"] == "model_parameter"

    def test_blocks(self, client, folklore_body):
        body = client.post("/api/algorithms/blocks", json=folklore_body).json()
        assert body["data"]["relabel"] == [1, 2, 0]


class TestOracle:
    def test_stable_set(self, client, folklore_body):
        body = client.post("/api/oracle/stable-set", json={"instance": folklore_body}).json()
        assert body["data"]["count"] == 3

    def test_guard(self, client, folklore_body):
        response = client.post("/api/oracle/stable-set", json={"instance": folklore_body, "guard": 2})
        assert response.status_code == 422
        assert response.json()["details"] == "raise --guard to search anyway"
        assert response.json()["code"] == "oracle_guard_exceeded"


class TestExperiments:
    def test_catalog(self, client):
        names = [info["name"] for info in client.get("/api/experiments/list").json()["data"]]
        assert "folklore-lb" in names

    def test_run(self, client):
        config = {"name": "oracle-sweep", "n": [3], "trials": 5, "seed": 9}
        body = client.post("/api/experiments/run", json=config).json()
        assert body["data"]["verdict"] == "pass"
        assert "rows" not in body["data"]

    def test_unknown(self, client):
        response = client.post("/api/experiments/run", json={"name": "nope", "seed": 1})
        assert response.status_code == 422
        assert response.json()["error"] == "Unknown experiment 'nope'"

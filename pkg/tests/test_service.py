"""HTTP service: endpoint contracts, session isolation, serialization."""

import threading

import pytest
from fastapi.testclient import TestClient

from datadesk.fixtures import generate_fixtures
from datadesk.service import create_app

Q1 = "Show the monthly trend of rape incidents from the reports"
Q4 = "What are the top 3 categories of headlines?"


@pytest.fixture(scope="module")
def fx(tmp_path_factory):
    return generate_fixtures(tmp_path_factory.mktemp("svcfx"), rows=120, seed=42)


@pytest.fixture()
def client(fx, tmp_path):
    app = create_app(fx["manifest"], tmp_path / "artifacts", geometry_path=fx["geometry"],
                     model_dir=tmp_path / "models")
    return TestClient(app)


def _create(client, **body):
    response = client.post("/sessions", json=body or None)
    assert response.status_code == 201
    return response.json()["session_id"]


def _post(client, sid, text):
    return client.post(f"/sessions/{sid}/messages", json={"text": text})


class TestSessionEndpoints:
    def test_create_returns_id_and_seed(self, client):
        response = client.post("/sessions", json={"seed": 7})
        assert response.status_code == 201
        body = response.json()
        assert body["seed"] == 7 and body["session_id"]

    def test_bad_agent_name_400(self, client):
        assert client.post("/sessions", json={"agent": "wizard"}).status_code == 400

    def test_unknown_session_404(self, client):
        assert _post(client, "nope", "hello").status_code == 404

    def test_empty_text_422(self, client):
        sid = _create(client)
        assert _post(client, sid, "   ").status_code == 422

    def test_turn_errors_return_200_with_diagnostic(self, client):
        sid = _create(client)
        response = _post(client, sid, "xyzzy plugh quux")
        assert response.status_code == 200
        assert response.json()["error"] is not None

    def test_q1_turn_carries_artifact_ref(self, client):
        sid = _create(client)
        document = _post(client, sid, Q1).json()
        assert document["error"] is None
        assert document["artifacts"][0]["kind"] == "trend-line"
        artifact_id = document["artifacts"][0]["id"]
        artifact = client.get(f"/artifacts/{artifact_id}")
        assert artifact.status_code == 200
        assert artifact.headers["content-type"].startswith("image/svg+xml")
        assert b"<svg" in artifact.content

    def test_history_orders_turns(self, client):
        sid = _create(client)
        _post(client, sid, Q1)
        _post(client, sid, Q4)
        history = client.get(f"/sessions/{sid}/history").json()
        assert [h["turn"] for h in history] == [1, 2]

    def test_unknown_artifact_404(self, client):
        assert client.get("/artifacts/nope/deeper.svg").status_code == 404
        assert client.get("/artifacts/../escape.svg").status_code == 404


class TestDatasets:
    def test_descriptor_payload_includes_schema_and_sample(self, client):
        body = client.get("/datasets").json()
        assert [d["name"] for d in body] == ["ProthomAlo", "NGORep"]
        first = body[0]
        assert first["rows"] == 120
        assert {c["name"] for c in first["schema"]} >= {"headline", "district-tag"}
        assert len(first["sample"]) == 5


class TestIsolationAndSerialization:
    def test_sessions_do_not_observe_each_other(self, client, fx, tmp_path):
        solo_app = create_app(fx["manifest"], tmp_path / "solo", geometry_path=fx["geometry"])
        solo = TestClient(solo_app)

        def run_script(c, queries):
            sid = _create(c, seed=42)
            documents = [_post(c, sid, q).json() for q in queries]
            artifact_bytes = [
                c.get(f"/artifacts/{a['id']}").content
                for d in documents for a in d["artifacts"]
            ]
            stripped = [
                {k: v for k, v in d.items() if k != "artifacts"} for d in documents
            ]
            return stripped, artifact_bytes

        solo_q1 = run_script(solo, [Q1, Q4])
        solo_q4 = run_script(solo, [Q4, Q1])

        results: dict[str, tuple] = {}

        def interleaved(name, queries):
            results[name] = run_script(client, queries)

        t1 = threading.Thread(target=interleaved, args=("a", [Q1, Q4]))
        t2 = threading.Thread(target=interleaved, args=("b", [Q4, Q1]))
        t1.start(); t2.start(); t1.join(); t2.join()

        assert results["a"] == solo_q1
        assert results["b"] == solo_q4

    def test_concurrent_posts_to_one_session_are_serialized(self, client):
        sid = _create(client)
        outcomes = []

        def send(text):
            outcomes.append(_post(client, sid, text).json()["turn"])

        threads = [threading.Thread(target=send, args=(Q1,)) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(outcomes) == [1, 2, 3, 4]
        history = client.get(f"/sessions/{sid}/history").json()
        assert [h["turn"] for h in history] == [1, 2, 3, 4]


class TestManifestFailure:
    def test_503_when_manifest_unreadable(self, tmp_path):
        bad = tmp_path / "broken.json"
        bad.write_text("{not json", encoding="utf-8")
        app = create_app(bad, tmp_path / "a")
        client = TestClient(app)
        assert client.post("/sessions").status_code == 503
        assert client.get("/datasets").status_code == 503


class TestServeCommand:
    def test_serve_cli_boots_and_answers(self, fx, tmp_path):
        import os
        import subprocess
        import sys
        import time
        import urllib.request

        port = 8600 + (os.getpid() % 200)
        process = subprocess.Popen(
            [sys.executable, "-m", "datadesk.cli", "serve",
             "--manifest", str(fx["manifest"]), "--port", str(port),
             "--artifacts", str(tmp_path / "art")],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
        )
        try:
            deadline = time.time() + 30
            body = None
            while time.time() < deadline:
                try:
                    with urllib.request.urlopen(
                        f"http://127.0.0.1:{port}/datasets", timeout=2
                    ) as response:
                        body = response.read().decode("utf-8")
                    break
                except OSError:
                    time.sleep(0.25)
            assert body is not None, "serve did not come up"
            assert "ProthomAlo" in body
        finally:
            process.terminate()
            process.wait(timeout=10)

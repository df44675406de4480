import io
import json

import pytest
from fastapi.testclient import TestClient

from newsprior.api import create_app
from newsprior.cli import run
from newsprior.engine import Engine
from newsprior.fixtures import GOLDEN_CLAIM


@pytest.fixture
def setup(golden_dir):
    cfg = golden_dir / "config.yaml"
    assert run(["-c", str(cfg), "profile-all"], io.StringIO(), io.StringIO()) == 0
    engine = Engine.from_file(cfg)
    return cfg, engine, TestClient(create_app(engine), raise_server_exceptions=False)


def cli_out(cfg, *argv):
    out = io.StringIO()
    assert run(["-c", str(cfg), *argv], out, io.StringIO()) == 0
    return out.getvalue().encode()


def test_health_fresh_store(golden_dir):
    client = TestClient(create_app(Engine.from_file(golden_dir / "config.yaml")))
    r = client.get("/v1/health")
    assert r.status_code == 200 and r.json()["snapshot_id"] == 0


def test_headers_and_health(setup):
    _, engine, client = setup
    r = client.get("/v1/health")
    assert r.json()["snapshot_id"] == 1
    assert r.headers["x-config-hash"] == engine.config.config_hash()
    assert r.headers["x-engine-version"]


def test_profile_matches_cli(setup):
    cfg, _, client = setup
    r = client.get("/v1/profile/harbortimes.example")
    assert r.status_code == 200 and r.content == cli_out(cfg, "profile", "harbortimes.example")
    assert client.get("/v1/profile/unknown.example").status_code == 404


def test_claim_matches_cli(setup):
    cfg, _, client = setup
    r = client.post("/v1/score/claim", json={"claim": GOLDEN_CLAIM})
    assert r.status_code == 200 and r.content == cli_out(cfg, "score-claim", GOLDEN_CLAIM)


@pytest.mark.parametrize("body", [b"{not json", b'{"claim": ""}', b'{"claim": 3}',
                                  b'{"claim": "x", "extra": 1}', b"[]"])
def test_claim_bad_body(setup, body):
    r = setup[2].post("/v1/score/claim", content=body)
    assert r.status_code == 400 and "error" in r.json()


def test_score_article(setup):
    cfg, engine, client = setup
    art = engine.articles["g2"].to_dict()
    r = client.post("/v1/score/article", json=art)
    assert r.status_code == 200 and r.content == cli_out(cfg, "score-article", "g2")
    assert client.post("/v1/score/article", json={"article": art}).content == r.content


def test_score_article_errors(setup):
    _, engine, client = setup
    art = engine.articles["g2"].to_dict()
    bad = dict(art, body="")
    r = client.post("/v1/score/article", json=bad)
    assert r.status_code == 400 and r.json()["field"] == "body"
    other = dict(art, url="https://elsewhere.example/x", source_domain="elsewhere.example")
    assert client.post("/v1/score/article", json=other).status_code == 404


def test_internal_error_is_opaque(setup, monkeypatch):
    _, engine, client = setup

    def boom():
        raise RuntimeError("secret detail")
    monkeypatch.setattr(engine, "health", boom)
    r = client.get("/v1/health")
    assert r.status_code == 500 and "secret" not in r.text and r.json()["incident"]

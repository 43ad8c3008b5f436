import math

import pytest
from fastapi.testclient import TestClient

from akgraph.graph import GraphBuilder, JournalRecord
from akgraph.ingest import export_tsv_snapshot
from akgraph.service import ServiceConfig, app_for, create_app
from helpers import make_paper

FIXTURE = "fixtures/scientometrics-mini"


@pytest.fixture(scope="module")
def eleven_snapshot(tmp_path_factory):
    """Snapshot where Y=2010 matches exactly 11 papers."""
    b = GraphBuilder()
    b.add_journal(JournalRecord(30, "cap journal"))
    for i in range(1, 12):
        b.add_paper(make_paper(i, title=f"capped paper {i}", year=2010,
                               citation_count=i, estimated_citation_count=i,
                               journal_id=30))
    b.add_paper(make_paper(12, title="outside the window", year=2011,
                           citation_count=5, estimated_citation_count=5,
                           journal_id=30))
    out = tmp_path_factory.mktemp("snap") / "eleven"
    export_tsv_snapshot(b.build(), out)
    return out


@pytest.fixture(scope="module")
def client(eleven_snapshot):
    app = create_app(snapshot_path=eleven_snapshot, cap=10)
    return TestClient(app)


def test_health_before_and_after_load(eleven_snapshot):
    bare = TestClient(create_app())
    resp = bare.get("/health")
    assert resp.status_code == 503
    assert resp.json() == {"status": "no-snapshot"}

    loaded = TestClient(create_app(snapshot_path=eleven_snapshot))
    resp = loaded.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["snapshot"]["papers"] == 12
    assert body["snapshot"]["journals"] == 1


def test_query_endpoints_503_until_loaded():
    bare = TestClient(create_app())
    for path in ("/evaluate", "/calchistogram"):
        resp = bare.get(path, params={"expr": "Y=2010"})
        assert resp.status_code == 503
        assert resp.json()["error"]["code"] == "NoSnapshot"


def test_evaluate_envelope_exact(client):
    resp = client.get("/evaluate", params={"expr": "Id=1", "attributes": "Id,Ti,Y"})
    assert resp.status_code == 200
    rank = 11  # ECC order: 11..6, then the 5/12 tie by Id, then 4..1
    assert resp.json() == {
        "expr": "Id=1",
        "entities": [{"logprob": -math.log1p(rank), "Id": 1,
                      "Ti": "capped paper 1", "Y": 2010}],
    }


def test_evaluate_ordering_and_pagination(client):
    full = client.get("/evaluate", params={"expr": "Y=2010", "count": 100}).json()
    ids = [e["Id"] for e in full["entities"]]
    assert ids == list(range(11, 0, -1))  # descending ECC (paper 12 not matched)
    logprobs = [e["logprob"] for e in full["entities"]]
    assert logprobs == sorted(logprobs, reverse=True)
    page = client.get("/evaluate",
                      params={"expr": "Y=2010", "count": 3, "offset": 2}).json()
    assert [e["Id"] for e in page["entities"]] == ids[2:5]


def test_missing_expr_is_syntax_error_at_zero(client):
    for path in ("/evaluate", "/calchistogram"):
        resp = client.get(path)
        assert resp.status_code == 400
        err = resp.json()["error"]
        assert err["code"] == "SyntaxError"
        assert err["position"] == 0


def test_unknown_parameter_rejected(client):
    resp = client.get("/evaluate", params={"expr": "Y=2010", "extended": "1"})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "UnknownParameter"
    resp = client.get("/calchistogram", params={"expr": "Y=2010", "model": "x"})
    assert resp.status_code == 400


def test_bad_expressions_are_400(client):
    cases = {
        "Y=": "SyntaxError",
        "Zz=1": "UnknownAttribute",
        "Ti=5": "TypeMismatch",
        "E.DOI='10.1/x'": "NonQueryableAttribute",
    }
    for expr, code in cases.items():
        resp = client.get("/evaluate", params={"expr": expr})
        assert resp.status_code == 400, expr
        assert resp.json()["error"]["code"] == code


def test_count_and_offset_validation(client):
    for params in ({"count": "0"}, {"count": "1001"}, {"count": "x"},
                   {"offset": "-1"}):
        resp = client.get("/evaluate", params={"expr": "Y=2010", **params})
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "InvalidParameter"


def test_histogram_envelope_and_cap(client):
    # 10 matches stays under the cap of 10? No: cap allows up to 10.
    resp = client.get("/calchistogram",
                      params={"expr": "Y=2011", "attributes": "CC"})
    assert resp.status_code == 200
    assert resp.json() == {
        "expr": "Y=2011",
        "num_entities": 1,
        "histograms": [{"attribute": "CC", "distinct_values": 1,
                        "total_count": 1,
                        "histogram": [{"value": 5, "count": 1}]}],
    }
    over = client.get("/calchistogram", params={"expr": "Y=2010"})
    assert over.status_code == 413
    assert over.json()["error"]["code"] == "CapExceeded"


def test_histogram_rejects_extended_attribute(client):
    resp = client.get("/calchistogram",
                      params={"expr": "Y=2011", "attributes": "E.DOI"})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "NonQueryableAttribute"


def test_extended_query_is_deployment_config(eleven_snapshot, repo_root):
    locked = TestClient(create_app(snapshot_path=repo_root / FIXTURE))
    resp = locked.get("/evaluate", params={"expr": "E.DOI='10.5555/mini.0001'"})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "NonQueryableAttribute"

    cfg = ServiceConfig(snapshot_path=repo_root / FIXTURE, extended_query=True)
    open_client = TestClient(app_for(cfg))
    resp = open_client.get("/evaluate", params={
        "expr": "E.DOI='10.5555/MINI.0001'", "attributes": "Id"})
    assert resp.status_code == 200
    assert [e["Id"] for e in resp.json()["entities"]] == [1]


def test_reload_swaps_snapshot(eleven_snapshot, repo_root):
    client = TestClient(create_app())
    assert client.get("/health").status_code == 503
    resp = client.post("/reload", json={"path": str(eleven_snapshot)})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["snapshot"]["papers"] == 12
    assert client.get("/health").json()["snapshot"]["papers"] == 12

    resp = client.post("/reload", json={"path": str(repo_root / FIXTURE)})
    assert resp.status_code == 200
    assert client.get("/health").json()["snapshot"]["papers"] == 133


def test_reload_validation():
    client = TestClient(create_app())
    assert client.post("/reload", json={}).status_code == 400
    assert client.post("/reload", content=b"not json").status_code == 400
    bad_mode = client.post("/reload", json={"path": "x", "mode": "fast"})
    assert bad_mode.status_code == 400
    missing = client.post("/reload", json={"path": "/nonexistent/snapshot"})
    assert missing.status_code == 400
    assert missing.json()["error"]["code"] == "MissingFile"
    # a failed reload must not clobber service state
    assert client.get("/health").status_code == 503


def test_methods_are_fixed(client):
    assert client.post("/evaluate", json={}).status_code == 405
    assert client.get("/reload").status_code == 405


def test_logprob_precision_survives_wire(client):
    resp = client.get("/evaluate", params={"expr": "Y=2010", "count": 11})
    texts = resp.text
    # repr-precision floats: -ln(2) with its full digit string
    assert format(-math.log1p(1), ".17g").rstrip("0") in texts or repr(-math.log1p(1)) in texts

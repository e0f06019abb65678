import json

import pytest

from confluent import fixtures as F
from confluent.cli import SCHEMA, canonical, main, run, write_artifact
from confluent.diagram import ConfluentDiagram
from confluent.graph import Graph


@pytest.fixture
def files(tmp_path):
    F.export(tmp_path)
    return tmp_path


def call(capsys, *argv):
    code = main([str(a) for a in argv])
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == SCHEMA
    return code, out


def test_derive_k5(files, capsys):
    code, out = call(capsys, "derive", "--in", files / "k5_soc.json")
    assert code == 0 and out["status"] == "ok"
    assert len(out["payload"]["graph"]["edges"]) == 10


def test_checks(files, capsys):
    assert call(capsys, "check", "strict", "--in", files / "k5_soc.json")[0] == 0
    assert call(capsys, "check", "embedding", "--in", files / "delta_k5e.json")[0] == 0
    assert call(capsys, "check", "tree-like", "--in", files / "delta_k5e.json")[0] == 0
    code, out = call(capsys, "check", "tree-like", "--in", files / "k5_soc.json")
    assert code == 1 and out["status"] == "violation"
    code, _ = call(capsys, "check", "strict", "--in", files / "lollipop_cycle.json")
    assert code == 1


def test_orders_scan(files, capsys):
    code, out = call(capsys, "orders", "scan", "--in", files / "w5.graph.json")
    assert code == 1 and out["summary"] == "no fully representable order"
    code, out = call(capsys, "orders", "scan", "--in", files / "k33.graph.json")
    assert code == 0 and len(out["payload"]["order"]) == 6
    code, _ = call(capsys, "orders", "scan", "--in", files / "w7.graph.json", "--cap", "5")
    assert code == 2


def test_cw_build_eval_verify(files, capsys, tmp_path):
    e = tmp_path / "e.json"
    code, out = call(capsys, "cw", "build", "--in", files / "delta_k5e.json", "--out", e)
    assert code == 0 and out["payload"]["width"] <= 16
    assert "isomorphic=true" in out["summary"]
    code, out = call(capsys, "cw", "eval", "--in", e)
    assert code == 0 and len(out["payload"]["graph"]["edges"]) == 9
    assert call(capsys, "cw", "verify", "--expr", e, "--in", files / "delta_k5e.json")[0] == 0
    assert call(capsys, "cw", "verify", "--expr", e, "--in", files / "k5_soc.json")[0] == 1
    assert call(capsys, "cw", "build", "--in", files / "k5_soc.json")[0] == 1


def test_cops(files, capsys):
    code, out = call(capsys, "cops", "play", "--diagram", files / "cycle6.json", "--robber", "optimal")
    assert code == 0 and out["payload"]["game"]["captured"]
    moves = out["payload"]["game"]["transcript"]
    assert moves[0]["cops"] and "robber" in moves[0]
    code, a = call(capsys, "cops", "play", "--diagram", files / "cycle6.json", "--robber", "random", "--seed", "4")
    code, b = call(capsys, "cops", "play", "--diagram", files / "cycle6.json", "--robber", "random:4")
    assert a["payload"] == b["payload"]
    _, out = call(capsys, "cops", "solve", "--graph", files / "c4.graph.json", "--k", "1")
    assert out["payload"]["cops_win"] is False
    _, out = call(capsys, "cops", "solve", "--graph", files / "c4.graph.json", "--k", "2")
    assert out["payload"]["cops_win"] is True
    assert call(capsys, "cops", "play", "--diagram", files / "isolated3.json")[0] == 1
    assert call(capsys, "cops", "play", "--diagram", files / "k2.json", "--robber", "sly")[0] == 2


def test_interactive_cops(files, capsys, monkeypatch):
    answers = iter(["?", "x", "x", "x", "x"])
    monkeypatch.setattr("builtins.input", lambda _: next(answers))
    code, out = call(capsys, "cops", "play", "--diagram", files / "k5_soc.json", "--robber", "interactive")
    assert code == 0 and out["payload"]["game"]["captured"]


def test_strings_build_and_certify(files, capsys, tmp_path):
    t = tmp_path / "t.json"
    svg = tmp_path / "t.svg"
    code, out = call(capsys, "strings", "build", "--in", files / "k5_soc.json", "--out", t, "--svg", svg)
    assert code == 0 and out["payload"]["checks"] == {"intersection_graph": True, "outer_string": True}
    assert svg.read_text().count("data-trace") == 5
    assert call(capsys, "strings", "certify", "--in", files / "k5_soc.json", "--traces", t)[0] == 0
    # traces of another diagram do not represent this one
    assert call(capsys, "strings", "certify", "--in", files / "delta_k5e.json", "--traces", t)[0] == 1


def test_build_unit_interval_round_trip(capsys, tmp_path):
    iv = tmp_path / "iv.json"
    iv.write_text(json.dumps({"unit": "1", "intervals": {"a": ["0", "1"], "b": ["1/2", "3/2"],
                                                         "c": ["1", "2"], "d": ["3", "4"]}}))
    out1 = tmp_path / "d.json"
    code, res = call(capsys, "build", "unit-interval", "--in", iv, "--out", out1)
    assert code == 0 and all(res["payload"]["checks"].values())
    d = ConfluentDiagram.load(out1)
    out2 = tmp_path / "d2.json"
    write_artifact(out2, d.to_json())
    assert out1.read_bytes() == out2.read_bytes()
    # the written diagram re-verifies identically
    _, again = call(capsys, "check", "strict", "--in", out2)
    assert again["status"] == "ok"


def test_build_bipartite(capsys, tmp_path, files):
    g = tmp_path / "g.json"
    write_artifact(g, Graph(list("abcd"), [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).to_json())
    out = tmp_path / "d.json"
    code, res = call(capsys, "build", "bipartite-soc", "--in", g, "--out", out)
    assert code == 0 and res["payload"]["checks"] == {"embedding": True, "isomorphic": True, "strict": True}
    assert call(capsys, "check", "strict", "--in", out)[0] == 0
    code, res = call(capsys, "build", "bipartite-soc", "--in", files / "domino.graph.json")
    assert code == 1 and "domino" in res["summary"]


def test_render(files, capsys, tmp_path):
    svg = tmp_path / "x.svg"
    code, _ = call(capsys, "render", "svg", "--in", files / "delta_k5e.json", "--out", svg)
    assert code == 0 and svg.read_text().count('class="delta"') == 2


def test_usage_errors(files, capsys, tmp_path):
    assert call(capsys, "derive")[0] == 2
    assert call(capsys, "derive", "--in", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call(capsys, "derive", "--in", bad)[0] == 2
    bad.write_text('{"nodes": [{"id": "a"}]}')
    assert call(capsys, "derive", "--in", bad)[0] == 2
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys, "check", "upside-down", "--in", files / "k2.json")[0] == 2


def test_output_is_canonical(files):
    a = run(["derive", "--in", str(files / "k5_soc.json")])
    b = run(["derive", "--in", str(files / "k5_soc.json")])
    assert canonical(a.envelope("derive")) == canonical(b.envelope("derive"))
    assert list(json.loads(canonical({"b": 1, "a": 2}))) == ["a", "b"]

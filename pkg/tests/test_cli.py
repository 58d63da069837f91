import json
import subprocess
import sys

import pytest

from tmwqo.cli import GUARD, NEGATIVE, OK, USAGE, dispatch, main
from tmwqo.graph import graph_to_obj, make_graph
from tmwqo.treedecomp import decomposition_to_obj, path_decomposition


@pytest.fixture
def files(tmp_path):
    g = make_graph("abc", [("a", "b"), ("b", "c")])
    tri = make_graph("xyz", [("x", "y"), ("y", "z"), ("z", "x")])
    paths = {}
    for name, obj in [("path", graph_to_obj(g)), ("tri", graph_to_obj(tri)),
                      ("td", decomposition_to_obj(path_decomposition(g, ["ab", "bc"]))),
                      ("bad_td", decomposition_to_obj(path_decomposition(g, ["ab", "c"])))]:
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(obj))
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def without_timing(report):
    return {k: v for k, v in report.items() if k != "timing_ms"}


def test_validate_td(files):
    code, rep, _ = dispatch(["validate-td", "--graph", files["path"], "--td", files["td"]])
    assert code == OK and rep["verdict"] == "ok" and rep["results"]["valid"]
    assert set(rep["inputs"]) == {"graph", "td"}


def test_invalid_td_is_negative(files):
    code, rep, _ = dispatch(["validate-td", "--graph", files["path"], "--td", files["bad_td"]])
    assert code == NEGATIVE and rep["verdict"] == "negative" and rep["results"]["violation"]["rule"]


def test_metrics(files):
    code, rep, _ = dispatch(["metrics", "--graph", files["path"], "--td", files["td"]])
    assert code == OK and rep["results"]["width"] == 1


def test_rc_writes_outputs(files):
    out, dot = files["dir"] / "rc.json", files["dir"] / "rc.dot"
    code, rep, _ = dispatch(["rc", "--k", "3", "--out", str(out), "--dot", str(dot)])
    assert code == OK
    assert json.loads(out.read_text()) == rep["results"]["graph"]
    assert dot.read_text().startswith("graph")


def test_tm_positive_and_negative(files):
    code, rep, _ = dispatch(["tm", "--graph", files["path"], "--graph", files["tri"]])
    assert code == OK and rep["results"]["contained"]
    code, rep, _ = dispatch(["tm", "--graph", files["tri"], "--graph", files["path"]])
    assert code == NEGATIVE and not rep["results"]["contained"]


@pytest.mark.parametrize("argv", [
    ["metrics", "--bogus"],
    ["metrics", "--graph", "/nonexistent.json", "--td", "/nonexistent.json"],
    ["rc"],
    [],
])
def test_usage_errors(argv):
    code, rep, msg = dispatch(argv)
    assert code == USAGE and rep is None and msg


def test_malformed_json(files):
    p = files["dir"] / "junk.json"
    p.write_text("{not json")
    code, _, msg = dispatch(["metrics", "--graph", str(p), "--td", files["td"]])
    assert code == USAGE and "bad input" in msg


def test_timeout_is_undecided():
    code, rep, _ = dispatch(["antichain", "--k", "5", "--timeout-ms", "1"])
    assert code == GUARD and rep["verdict"] == "undecided"


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("TMWQO_SEED", "7")
    assert dispatch(["rc", "--k", "1"])[1]["seed"] == 7
    assert dispatch(["rc", "--k", "1", "--seed", "3"])[1]["seed"] == 3


def test_reports_are_deterministic(files):
    argv = ["suite", "menger", "--count", "20", "--seed", "5"]
    a, b = dispatch(argv)[1], dispatch(argv)[1]
    assert json.dumps(without_timing(a), sort_keys=True) == json.dumps(without_timing(b), sort_keys=True)


def test_empty_suite_passes():
    code, rep, _ = dispatch(["suite", "menger", "--count", "0"])
    assert code == OK and rep["results"]["total"] == 0 and rep["results"]["ok"]


def test_main_prints_json(capsys):
    assert main(["rc", "--k", "1"]) == OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["command"] == "rc" and "timing_ms" in rep


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "tmwqo", "rc", "--k", "1"], capture_output=True, text=True)
    assert out.returncode == OK and json.loads(out.stdout)["verdict"] == "ok"

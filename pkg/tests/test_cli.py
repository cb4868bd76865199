import json

import pytest

from tvgsim.cli import main
from tvgsim.io import save_scenario
from tvgsim.scenarios import ALWAYS, generate_gk, named_graph
from tvgsim.tvg import Tvg

C5_TEXT = "vertices: a, b, c, d, e\n" + "".join(
    f"edge: {u} {v}\n" for (u, v) in [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]
)


@pytest.fixture
def c5_file(tmp_path):
    path = tmp_path / "c5.txt"
    path.write_text(C5_TEXT)
    return str(path)


@pytest.fixture
def g1_file(tmp_path):
    path = tmp_path / "g1.json"
    save_scenario(generate_gk(1), str(path))
    return str(path)


def test_analyze(c5_file, capsys):
    assert main(["analyze", c5_file, "--all-mds", "--smds"]) == 0
    out = capsys.readouterr().out
    assert "vertices: 5" in out
    assert "diameter: 2" in out
    assert "minimal dominating sets (5):" in out
    assert "no strong minimal dominating set" in out
    assert "witness d" in out


def test_analyze_star(tmp_path, capsys):
    path = tmp_path / "star.txt"
    path.write_text("vertices: hub, x, y, z\nedge: hub x\nedge: hub y\nedge: hub z\n")
    assert main(["analyze", str(path), "--smds"]) == 0
    assert "strong minimal dominating set: {hub}" in capsys.readouterr().out


def test_analyze_disconnected(tmp_path, capsys):
    path = tmp_path / "d.txt"
    path.write_text("vertices: a, b, c\nedge: a b\n")
    assert main(["analyze", str(path)]) == 0
    assert "disconnected" in capsys.readouterr().out


def test_analyze_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("nope\n")
    assert main(["analyze", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_file():
    assert main(["analyze", "/no/such/file.txt"]) == 1


def test_usage_error():
    assert main(["frobnicate"]) == 1
    assert main([]) == 1


def test_simulate_with_metrics_and_trace(g1_file, tmp_path, capsys):
    trace_path = tmp_path / "trace.txt"
    code = main(
        [
            "simulate",
            g1_file,
            "--protocol",
            "ug",
            "--horizon",
            "30",
            "--metrics",
            "--trace",
            str(trace_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0].startswith("p0 ")
    report = json.loads(lines[-1])
    assert report == {
        "step": 1,
        "starting_time": 1,
        "convergence_tick": 3,
        "convergence_steps_num": 2,
        "convergence_steps_den": 1,
    }
    text = trace_path.read_text()
    assert "FINAL" in text
    assert text.splitlines()[0] == "0 EdgeUp p0 p2"


def test_simulate_not_converged(g1_file, capsys):
    # one tick is not enough for the underlying-graph protocol
    assert main(["simulate", g1_file, "--protocol", "ug", "--horizon", "1"]) == 3
    assert "not converged" in capsys.readouterr().err


def test_simulate_flood_requires_origin(g1_file):
    assert main(["simulate", g1_file, "--protocol", "flood", "--horizon", "10"]) == 1


def test_simulate_flood(g1_file, capsys):
    code = main(
        ["simulate", g1_file, "--protocol", "flood", "--horizon", "20", "--origin", "p0", "--metrics"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "p3 true" in out


def test_simulate_mdst(g1_file, capsys):
    code = main(["simulate", g1_file, "--protocol", "mdst", "--horizon", "40"])
    assert code == 0
    out = capsys.readouterr().out
    assert "p1 true" in out or "p0 true" in out


def test_journey(g1_file, capsys):
    assert main(["journey", g1_file, "--from", "p1", "--to", "p3", "--after", "1", "--deliverable"]) == 0
    assert capsys.readouterr().out.strip() == "3"
    assert main(["journey", g1_file, "--from", "p0", "--to", "nope"]) == 2


def test_journey_none(tmp_path, capsys):
    from tvgsim.graphs import StaticGraph
    from tvgsim.tvg import PresenceSchedule

    g = StaticGraph.of(["a", "b"], [("a", "b")])
    tvg = Tvg(g, {("a", "b"): PresenceSchedule.of([(0, 2)])}, {("a", "b"): 1})
    path = tmp_path / "s.json"
    save_scenario(tvg, str(path))
    assert main(["journey", str(path), "--from", "a", "--to", "b", "--after", "5"]) == 0
    assert capsys.readouterr().out.strip() == "none"


def test_generate_gk_and_random(tmp_path):
    out = tmp_path / "gk.json"
    assert main(["generate", "gk", "--k", "2", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["vertices"][0] == "p0"
    assert main(["generate", "gk", "--k", "0", "-o", str(out)]) == 2

    out2 = tmp_path / "r.json"
    assert main(
        ["generate", "random", "--nodes", "6", "--extra", "0.3", "--missing", "0.2", "--seed", "4", "-o", str(out2)]
    ) == 0
    d = json.loads(out2.read_text())
    assert len(d["vertices"]) == 6


def test_adversary_cli(c5_file, capsys):
    assert main(["adversary", "--graph", c5_file, "--rounds", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("round ") == 2
    assert "witness d" in out


def test_adversary_inapplicable(tmp_path, capsys):
    path = tmp_path / "star.txt"
    path.write_text("vertices: a, b, c\nedge: a b\nedge: a c\n")
    assert main(["adversary", "--graph", str(path), "--rounds", "1"]) == 2
    assert "inapplicable" in capsys.readouterr().err

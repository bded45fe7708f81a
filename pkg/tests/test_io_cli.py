import json

import pytest

from minorsep import io
from minorsep.cli import main
from minorsep.config import DESK
from minorsep.generators import grid, star
from minorsep.graph_core import VertexSet
from minorsep.helpers import InputError
from minorsep.models import MinorModel
from minorsep.separator import find_separator_once


def test_parse_graph_with_comments():
    g = io.parse_graph(["# triangle minus an edge", "p 3 2", "", "0 1", "1 2"])
    assert (g.n, g.m) == (3, 2)


@pytest.mark.parametrize(
    "lines, message",
    [
        ([], "empty"),
        (["q 3 2"], "expected 'p"),
        (["p 3 2", "0 1"], "declares 2 edges"),
        (["p 3 1", "0 1", "1 2"], "more than"),
        (["p 3 1", "0 3"], "outside"),
        (["p 3 1", "0 x"], "integer"),
        (["p 3 1", "0 1 2"], "expected '<u> <v>'"),
    ],
)
def test_parse_graph_errors(lines, message):
    with pytest.raises(InputError, match=message):
        io.parse_graph(lines)


def test_parse_graph_edge_limits():
    lines = ["p 4 3", "0 1", "1 2", "2 3"]
    assert io.parse_graph(lines, max_edges=1).m == 1
    assert io.parse_graph(lines, edges_per_vertex=0).m == 0


def test_graph_file_round_trip(tmp_path):
    g = grid(3, 4)
    target = tmp_path / "grid.txt"
    io.write_graph(g, target)
    assert target.read_text().startswith("p 12 17\n")
    again = io.read_graph(target)
    assert again.edges().tolist() == g.edges().tolist()


def test_missing_file():
    with pytest.raises(InputError, match="cannot read"):
        io.read_graph("/nonexistent/graph.txt")


def test_separator_format():
    text = io.format_separator(VertexSet([4, 1]))
    assert text == "separator 2\n1\n4\n"
    assert io.parse_separator(text.splitlines()).tolist() == [1, 4]
    with pytest.raises(InputError):
        io.parse_separator(["separator 3", "1"])


def test_minor_format():
    model = MinorModel.from_lists([[0, 1], [2]])
    text = io.format_minor(model)
    assert text == "minor 2\n0 1\n2\n"
    assert io.parse_minor(text.splitlines()).branch_sets == model.branch_sets
    with pytest.raises(InputError):
        io.parse_minor(["minor 3", "0"])


def test_trace_dict_keeps_named_profile():
    trace = find_separator_once(star(10**4), 2, DESK).trace
    data = json.loads(json.dumps(io.trace_to_dict(trace)))
    loaded = io.trace_from_dict(data)
    assert loaded.profile is DESK
    assert [r.checksum for r in loaded.records] == [r.checksum for r in trace.records]
    assert loaded.records[-1].returned


def test_trace_dict_errors():
    with pytest.raises(InputError, match="version"):
        io.trace_from_dict({"version": 9})
    with pytest.raises(InputError, match="malformed"):
        io.trace_from_dict({"n": 3})
    bad_profile = {"n": 1, "h": 1, "records": [], "profile": {"name": "x", "turbo": 1}}
    with pytest.raises(InputError, match="unknown profile"):
        io.trace_from_dict(bad_profile)


def test_custom_profile_survives_round_trip():
    data = {
        "n": 1,
        "h": 1,
        "records": [],
        "profile": {"name": "desk", "w_init": 9},
    }
    profile = io.trace_from_dict(data).profile
    assert profile.w_init == 9
    assert profile is not DESK


def test_jsonl(tmp_path):
    target = tmp_path / "out.jsonl"
    io.write_jsonl([{"b": 1}, {"a": 2}], target)
    assert target.read_text().splitlines() == ['{"b": 1}', '{"a": 2}']


@pytest.fixture
def star_file(tmp_path):
    target = tmp_path / "star.txt"
    io.write_graph(star(10**4), target)
    return target


def test_cli_gen(tmp_path):
    target = tmp_path / "g.txt"
    assert main(["gen", "grid", "--a", "3", "--b", "3", "--out", str(target)]) == 0
    assert target.read_text().splitlines()[0] == "p 9 12"
    assert main(["gen", "random_regular", "--n", "10", "--d", "3", "--seed", "1",
                 "--out", str(target)]) == 0
    assert target.read_text().splitlines()[0] == "p 10 15"


def test_cli_wbfs(tmp_path, capsys):
    target = tmp_path / "p.txt"
    main(["gen", "path", "--n", "3", "--out", str(target)])
    assert main(["wbfs", str(target), "--weight", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["0 -1 2 3", "1 0 4 2", "2 1 6 1"]


def test_cli_kpr(tmp_path, capsys):
    target = tmp_path / "k.txt"
    main(["gen", "complete", "--n", "5", "--out", str(target)])
    assert main(["kpr", str(target), "--h", "2", "--delta", "1"]) == 0
    assert capsys.readouterr().out.startswith("separated |S|=0 |C*|=5")


def test_cli_separator_pipeline(star_file, tmp_path, capsys):
    sep_file = tmp_path / "s.txt"
    trace_file = tmp_path / "trace.json"
    args = ["sep", str(star_file), "--h", "2", "--profile", "desk"]
    assert main(args + ["--out", str(sep_file), "--trace", str(trace_file)]) == 0
    assert sep_file.read_text() == "separator 1\n0\n"

    assert main(["verify-sep", str(star_file), str(sep_file)]) == 0
    assert capsys.readouterr().out.startswith("valid: |S|=1")

    report = tmp_path / "inv.json"
    assert main(["check-invariants", str(star_file), str(trace_file), "--json", str(report)]) == 0
    assert json.loads(report.read_text())["passed"] is True
    assert capsys.readouterr().out.strip().endswith("passed")


def test_cli_failed_verification(tmp_path):
    graph = tmp_path / "p.txt"
    main(["gen", "path", "--n", "10", "--out", str(graph)])
    sep_file = tmp_path / "s.txt"
    sep_file.write_text("separator 1\n9\n")
    assert main(["verify-sep", str(graph), str(sep_file)]) == 1
    minor_file = tmp_path / "m.txt"
    minor_file.write_text("minor 2\n0\n5\n")
    assert main(["verify-minor", str(graph), str(minor_file)]) == 1


def test_cli_library_errors_exit_2(tmp_path, capsys):
    graph = tmp_path / "p.txt"
    main(["gen", "path", "--n", "10", "--out", str(graph)])
    assert main(["sep", str(graph), "--h", "2", "--profile", "desk"]) == 2
    assert "minorsep: delta is 0" in capsys.readouterr().err
    assert main(["sep", str(tmp_path / "none.txt"), "--h", "2"]) == 2
    assert main(["gen", "cycle", "--n", "2"]) == 2


def test_cli_dense_minor(tmp_path, capsys):
    graph = tmp_path / "k.txt"
    main(["gen", "complete", "--n", "4", "--out", str(graph)])
    capsys.readouterr()
    assert main(["dense-minor", str(graph), "--h", "1"]) == 0
    assert capsys.readouterr().out == "minor 1\n0\n"


def test_cli_minor_needs_trees(star_file, tmp_path, capsys):
    profile = tmp_path / "one.cfg"
    profile.write_text("base=desk\nk_base=1\n")
    code = main(["minor", str(star_file), "--t", "2", "--profile", str(profile)])
    assert code == 2
    assert "trees are needed" in capsys.readouterr().err


def test_cli_bench(tmp_path, capsys):
    records = tmp_path / "bench.jsonl"
    args = ["bench", "--family", "path", "--sizes", "400", "900", "--h", "2",
            "--trials", "1", "--profile", "desk", "--json", str(records)]
    assert main(args) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["sizes"] == [400, 900]
    assert len(summary["time_ratios"]) == 1
    lines = records.read_text().splitlines()
    assert [json.loads(line)["n"] for line in lines] == [400, 900]


def test_cli_trace_of_component_rounds(tmp_path, capsys):
    graph = tmp_path / "two.txt"
    edges = [(v, v + 1) for v in range(699)] + [(v, v + 1) for v in range(700, 799)]
    graph.write_text("p 800 798\n" + "".join(f"{u} {v}\n" for u, v in edges))
    profile = tmp_path / "unit.cfg"
    profile.write_text("base=desk\nw_init=1\n")
    trace_file = tmp_path / "trace.json"
    args = ["sep", str(graph), "--h", "2", "--profile", str(profile), "--trace", str(trace_file)]
    assert main(args + ["--out", str(tmp_path / "s.txt")]) == 0
    runs = json.loads(trace_file.read_text())["runs"]
    assert runs[0]["n"] == 700
    assert runs[0]["vertices"] == list(range(700))

    capsys.readouterr()
    report = tmp_path / "inv.json"
    assert main(["check-invariants", str(graph), str(trace_file), "--json", str(report)]) == 0
    assert capsys.readouterr().out.strip().endswith("passed")
    data = json.loads(report.read_text())
    assert data["passed"] is True
    assert len(data["runs"]) == len(runs)


def test_cli_writes_empty_trace_when_no_loop_ran(tmp_path, capsys, caplog):
    graph = tmp_path / "empty.txt"
    graph.write_text("p 6 0\n")
    trace_file = tmp_path / "trace.json"
    args = ["sep", str(graph), "--h", "2", "--profile", "desk", "--trace", str(trace_file)]
    assert main(args) == 0
    assert json.loads(trace_file.read_text())["runs"] == []
    assert "writing an empty trace" in caplog.text
    capsys.readouterr()
    assert main(["check-invariants", str(graph), str(trace_file)]) == 0
    assert capsys.readouterr().out.strip() == "passed"


def test_read_traces_accepts_single_runs(tmp_path):
    trace = find_separator_once(star(10**4), 2, DESK).trace
    single = tmp_path / "one.json"
    io.write_trace(trace, single)
    assert [r.n for r in io.read_traces(single)] == [10**4]
    both = tmp_path / "two.json"
    io.write_traces([trace, trace], both)
    assert len(io.read_traces(both)) == 2
    with pytest.raises(InputError, match="holds 2 runs"):
        io.read_trace(both)

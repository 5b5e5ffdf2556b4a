import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import grid_graph, seeds, tree_from_seed
from continua import gallery
from continua.cli import GraphParseError, fmt_float, format_graph, main, parse_graph, to_json
from continua.graph import h1

SEGMENT = "v 0 0\nv 1 0\ne 0 1\n"


@pytest.fixture
def graph_file(tmp_path):
    def write(g, name="g.graph"):
        p = tmp_path / name
        p.write_text(g if isinstance(g, str) else format_graph(g))
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParse:
    def test_segment(self):
        g = parse_graph("v 0 0\nv 1 0\ne 0 1")
        assert g.vertices.tolist() == [[0, 0], [1, 0]]
        assert g.edges == ((0, 1),)

    def test_comments_and_forward_reference(self):
        g = parse_graph("# tripod\ne 0 1  # leg\nv 0 0\nv 1 0\n\n")
        assert h1(g) == 1.0

    def test_index_out_of_range(self):
        with pytest.raises(GraphParseError, match="vertex index out of range at line 1, column 5") as exc:
            parse_graph("e 0 5\nv 0 0\nv 1 0")
        assert exc.value.line == 1

    def test_crossing_cites_both_edges(self):
        text = "v 0 0\nv 1 1\nv 1 0\nv 0 1\ne 0 1\ne 2 3\n"
        with pytest.raises(GraphParseError, match=r"edges 0 and 1: interior intersection \(lines 5, 6\)"):
            parse_graph(text)

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("v 0\n", "at least 2 coordinates at line 1"),
            ("v 0 x\n", "bad coordinate 'x' at line 1, column 5"),
            ("v 0 nan\n", "non-finite"),
            ("v 0 0\nv 0 0 0\n", "expected 2 at line 2"),
            ("v 0 0\nv 1 0\ne 0\n", "exactly 2 vertex indices at line 3"),
            ("v 0 0\nv 1 0\ne 0 -1\n", "bad vertex index '-1' at line 3, column 5"),
            ("w 0 0\n", "unknown record type 'w' at line 1"),
            ("# empty\n", "no vertices"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(GraphParseError, match=fragment.replace("(", r"\(")):
            parse_graph(text)

    @pytest.mark.parametrize(
        "g",
        [gallery.segment(), gallery.tripod(), gallery.polygon(64), gallery.theta_graph(), grid_graph(4)],
    )
    def test_roundtrip_gallery(self, g):
        back = parse_graph(format_graph(g))
        assert np.array_equal(back.vertices, g.vertices) and back.edges == g.edges

    @given(seeds)
    def test_roundtrip_random(self, seed):
        g = tree_from_seed(seed)
        back = parse_graph(format_graph(g))
        assert back.vertices.tobytes() == g.vertices.tobytes()
        assert back.edges == g.edges


class TestFormatting:
    def test_fmt_float(self):
        assert fmt_float(0.1) == "0.10000000000000001"
        assert fmt_float(2.0) == "2"

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_fmt_float_roundtrips(self, x):
        assert float(fmt_float(x)) == x

    def test_json_is_parseable(self):
        obj = {"a": [1, 2.5], "b": {"c": None, "d": True}, "e": [{"x": 0.1}]}
        assert json.loads(to_json(obj)) == obj


class TestCommands:
    def test_h1(self, capsys, graph_file):
        code, out, _ = run(capsys, "h1", graph_file(gallery.tripod()))
        assert (code, out) == (0, "3.0\n")

    def test_parametrize_summary(self, capsys, graph_file, tmp_path):
        target = tmp_path / "p.json"
        code, out, _ = run(capsys, "parametrize", graph_file(SEGMENT), "--out", str(target))
        assert (code, out) == (0, "length=2.0 h1=1.0 ratio=2.0\n")
        data = json.loads(target.read_text())
        assert data["ledger"] == {"edges": [{"edge": 0, "fwd": 1, "bwd": 1}]}
        assert data["iterations"] == 1
        assert data["path"]["breakpoints"][1] == [0.5, [1.0, 0.0]]

    def test_parametrize_euler(self, capsys, graph_file):
        code, out, _ = run(capsys, "parametrize", graph_file(gallery.tripod()), "--method", "euler")
        assert code == 0 and out.startswith("length=6.0 h1=3.0")

    def test_golab_csv(self, capsys):
        code, out, _ = run(capsys, "golab", "--scenario", "staircase", "--n", "2,4,8")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "n,dH,h1"
        assert [line.split(",")[0] for line in lines[1:4]] == ["2", "4", "8"]
        assert json.loads("\n".join(lines[4:]))["verdict"] == "holds"

    def test_ldelta(self, capsys, graph_file):
        code, out, _ = run(capsys, "ldelta", graph_file(SEGMENT), "--delta", "0.25,2")
        assert code == 0
        assert out.splitlines() == ["delta,diameter_sum,h1", "0.25,1,1", "2,1,1"]

    def test_ldelta_default_schedule(self, capsys, graph_file):
        code, out, _ = run(capsys, "ldelta", graph_file(gallery.polygon(8)))
        assert code == 0 and len(out.splitlines()) == 12

    def test_geodesic(self, capsys, graph_file):
        code, out, _ = run(capsys, "geodesic", graph_file(gallery.tripod()), "--from", "0:1", "--to", "2:1")
        assert code == 0
        pts = [bp[1] for bp in json.loads(out)["breakpoints"]]
        assert pts == [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]

    def test_hausdorff(self, capsys, graph_file):
        a = graph_file(SEGMENT, "a.graph")
        b = graph_file("v 0 0.5\nv 1 0.5\ne 0 1\n", "b.graph")
        code, out, _ = run(capsys, "hausdorff", a, b, "--eps", "0.1")
        data = json.loads(out)
        assert code == 0 and data["dH"] == 0.5 and data["error_bound"] == pytest.approx(0.2)

    def test_degzero(self, capsys, graph_file, tmp_path):
        seg = graph_file(SEGMENT)
        run(capsys, "parametrize", seg, "--out", str(tmp_path / "p.json"))
        code, out, _ = run(capsys, "degzero", str(tmp_path / "p.json"), "--graph", seg)
        data = json.loads(out)
        assert code == 0 and data["passed"] and data["ledger_even"] and data["seed"] == 0

        once = tmp_path / "once.json"
        once.write_text(json.dumps({"breakpoints": [[0, [0, 0]], [1, [1, 0]]]}))
        code, out, _ = run(capsys, "degzero", str(once))
        assert code == 0 and not json.loads(out)["passed"]

    def test_out_writes_file(self, capsys, graph_file, tmp_path):
        target = tmp_path / "h.txt"
        code, out, _ = run(capsys, "h1", graph_file(SEGMENT), "--out", str(target))
        assert (code, out) == (0, "")
        assert target.read_text() == "1.0\n"

    def test_selftest_subset(self, capsys):
        code, out, _ = run(capsys, "selftest", "--criteria", "1,2")
        assert code == 0
        assert sum(line.startswith("[PASS]") for line in out.splitlines()) == 2
        assert out.splitlines()[0] == "selftest seed=0"

    def test_deterministic(self, capsys, graph_file):
        g = graph_file(gallery.theta_graph())
        first = run(capsys, "ldelta", g)
        assert run(capsys, "ldelta", g) == first
        first = run(capsys, "golab", "--scenario", "comb", "--n", "4,16")
        assert run(capsys, "golab", "--scenario", "comb", "--n", "4,16") == first


class TestExitCodes:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "h1", str(tmp_path / "none.graph"))
        assert code == 2 and "cannot read" in err

    def test_malformed_graph(self, capsys, graph_file):
        code, _, err = run(capsys, "h1", graph_file("e 0 5\nv 0 0\nv 1 0\n"))
        assert code == 2 and "line 1" in err

    def test_unknown_flag(self, capsys, graph_file):
        code, _, _ = run(capsys, "h1", graph_file(SEGMENT), "--bogus")
        assert code == 2

    def test_bad_eps(self, capsys):
        code, _, _ = run(capsys, "golab", "--scenario", "dust", "--n", "2", "--eps", "-1")
        assert code == 2

    def test_computation_error(self, capsys, graph_file):
        code, _, err = run(capsys, "parametrize", graph_file(gallery.disjoint_segments(2)))
        assert code == 1 and "disconnected" in err

    def test_geodesic_different_components(self, capsys, graph_file):
        code, _, _ = run(capsys, "geodesic", graph_file(gallery.disjoint_segments(2)), "--from", "0:0.5", "--to", "1:0.5")
        assert code == 1

    def test_bad_point_syntax(self, capsys, graph_file):
        code, _, _ = run(capsys, "geodesic", graph_file(SEGMENT), "--from", "zero", "--to", "0:1")
        assert code == 2

    def test_help(self, capsys):
        assert main(["--help"]) == 0

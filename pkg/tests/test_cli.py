import json
from fractions import Fraction

import numpy as np
import pytest

from ctxgraph import io
from ctxgraph.cli import main
from ctxgraph.graphs import GraphFormatError, cycle_graph, wheel_graph


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.fixture
def files(tmp_path):
    def write(name, content):
        p = tmp_path / name
        p.write_text(content if isinstance(content, str) else json.dumps(content))
        return p

    return write


def pr_box_obj():
    h = "1/2"
    same = {"0,0": h, "1,1": h, "0,1": 0, "1,0": 0}
    diff = {"0,1": h, "1,0": h, "0,0": 0, "1,1": 0}
    return {"graph": "4: 0-1,1-2,2-3,0-3",
            "tables": [{"clique": [0, 1], "p": same}, {"clique": [1, 2], "p": same},
                       {"clique": [2, 3], "p": same}, {"clique": [0, 3], "p": diff}]}


class TestCheckChordal:
    def test_square(self, capsys, files):
        code, obj, _ = run(capsys, "check-chordal", files("c4.txt", "4: 0-1,1-2,2-3,0-3"))
        assert code == 10 and obj["induced_cycle"] == [0, 1, 2, 3]

    def test_triangle(self, capsys, files):
        code, obj, _ = run(capsys, "check-chordal", files("k3.json", {"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}))
        assert code == 0 and sorted(obj["peo"]) == [0, 1, 2]

    def test_wheel(self, capsys, files):
        code, _, _ = run(capsys, "check-chordal", files("w.json", io.graph_to_obj(wheel_graph(5))))
        assert code == 10

    @pytest.mark.parametrize("content", ["4: 0-1,1-x", '{"n": 2, "edges": [[0, 5]]}', "{not json"])
    def test_parse_error(self, capsys, files, content):
        code, obj, err = run(capsys, "check-chordal", files("bad.txt", content))
        assert code == 2 and obj is None and err


class TestClassify:
    @pytest.mark.parametrize("n, label", [(4, "a"), (5, "c"), (6, "c")])
    def test_cycles(self, capsys, files, n, label):
        code, obj, _ = run(capsys, "classify", files("g.json", io.graph_to_obj(cycle_graph(n))))
        assert code == 0 and obj["class"] == label

    def test_chordal(self, capsys, files):
        code, _, err = run(capsys, "classify", files("k3.txt", "3: 0-1,1-2,0-2"))
        assert code == 11 and "no contextuality possible" in err


class TestEnumerate:
    def test_six(self, capsys):
        code, obj, _ = run(capsys, "enumerate", "--max-n", 6)
        assert code == 0 and obj["counts"] == {"a": 5, "b": 8, "c": 11} and obj["total"] == 24

    def test_four_and_three(self, capsys):
        assert run(capsys, "enumerate", "--max-n", 4)[1]["total"] == 1
        assert run(capsys, "enumerate", "--max-n", 3)[1]["records"] == []

    def test_bound(self, capsys):
        assert run(capsys, "enumerate", "--max-n", 8)[0] == 2

    def test_any_mode(self, capsys):
        assert run(capsys, "enumerate", "--max-n", 6, "--filter-mode", "any")[1]["counts"] == {"a": 5, "b": 12, "c": 27}

    def test_records_round_trip(self, capsys, files):
        _, obj, _ = run(capsys, "enumerate", "--max-n", 5)
        for rec in obj["records"]:
            code, cert, _ = run(capsys, "check-chordal", files("r.json", rec))
            assert code == 10 and cert == rec["certificate"]

    def test_report_and_csv(self, capsys, tmp_path):
        rep, csv = tmp_path / "r.txt", tmp_path / "w.csv"
        run(capsys, "enumerate", "--max-n", 5, "--report", rep, "--csv", csv)
        assert "counts: a=2, b=1, c=1" in rep.read_text()
        rows = csv.read_text().strip().splitlines()
        assert len(rows) == 1 + 4
        for row in rows[1:]:
            value, bound = map(float, row.split(",")[-2:])
            assert value > bound


class TestExtend:
    def test_path(self, capsys, files):
        tables = {"tables": [
            {"clique": [0, 1], "p": {"0,0": "1/12", "0,1": "1/2", "1,0": "1/4", "1,1": "1/6"}},
            {"clique": [1, 2], "p": {"0,0": "1/6", "0,1": "1/6", "1,0": "1/3", "1,1": "1/3"}},
        ]}
        code, obj, _ = run(capsys, "extend", files("p.txt", "3: 0-1,1-2"), files("m.json", tables))
        assert code == 0
        joint = io.joint_from_obj(obj)
        pab = {(0, 0): Fraction(1, 12), (0, 1): Fraction(1, 2), (1, 0): Fraction(1, 4), (1, 1): Fraction(1, 6)}
        pbc = {(0, 0): Fraction(1, 6), (0, 1): Fraction(1, 6), (1, 0): Fraction(1, 3), (1, 1): Fraction(1, 3)}
        pb = {0: Fraction(1, 3), 1: Fraction(2, 3)}
        for a in range(2):
            for b in range(2):
                for c in range(2):
                    assert joint.table[a, b, c] == pab[a, b] * pbc[b, c] / pb[b]

    def test_single_edge_echo(self, capsys, files):
        p = {"0,0": 0.1, "0,1": 0.2, "1,0": 0.3, "1,1": 0.4}
        code, obj, _ = run(capsys, "extend", files("e.txt", "2: 0-1"), files("m.json", {"tables": [{"clique": [0, 1], "p": p}]}))
        assert code == 0 and obj["joint"]["p"] == p

    def test_square(self, capsys, files):
        code, _, _ = run(capsys, "extend", files("c4.txt", "4: 0-1,1-2,2-3,0-3"), files("pr.json", pr_box_obj()))
        assert code == 12

    def test_inconsistent(self, capsys, files):
        tables = {"tables": [{"clique": [0, 1], "p": {"0,0": 0.6, "1,1": 0.4}},
                             {"clique": [0, 2], "p": {"0,0": 0.4, "1,1": 0.6}}]}
        code, _, err = run(capsys, "extend", files("g.txt", "3: 0-1,0-2"), files("m.json", tables))
        assert code == 13 and "disagree" in err

    def test_output_feeds_membership(self, capsys, files, tmp_path):
        tables = {"tables": [{"clique": [0, 1], "p": {"0,0": 0.5, "1,1": 0.5}}]}
        out = tmp_path / "j.json"
        run(capsys, "extend", files("e.txt", "2: 0-1"), files("m.json", tables), "--out", out)
        assert run(capsys, "membership", out)[0] == 0


class TestMembership:
    def test_deterministic(self, capsys, files):
        t = {"0,0": 1}
        b = {"graph": "4: 0-1,1-2,2-3,0-3", "tables": [{"clique": c, "p": t} for c in ([0, 1], [1, 2], [2, 3], [0, 3])]}
        code, obj, _ = run(capsys, "membership", files("d.json", b))
        assert code == 0 and obj["weights"] == [{"assignment": [0, 0, 0, 0], "weight": 1}]

    def test_pr_box(self, capsys, files):
        code, obj, _ = run(capsys, "membership", files("pr.json", pr_box_obj()))
        assert code == 20
        assert obj["cycle_witness"]["classical_bound"] == 2 and obj["cycle_witness"]["value"] == 4
        assert obj["witness"]["classical_bound"] == 1

    def test_uniform(self, capsys, files):
        t = {"0,0": 0.25, "0,1": 0.25, "1,0": 0.25, "1,1": 0.25}
        b = {"graph": "5: 0-1,1-2,2-3,3-4,0-4",
             "tables": [{"clique": c, "p": t} for c in ([0, 1], [1, 2], [2, 3], [3, 4], [0, 4])]}
        assert run(capsys, "membership", files("u.json", b))[0] == 0

    def test_inconsistent(self, capsys, files):
        b = {"graph": "3: 0-1,0-2", "tables": [{"clique": [0, 1], "p": {"0,0": 1}}, {"clique": [0, 2], "p": {"1,1": 1}}]}
        assert run(capsys, "membership", files("i.json", b))[0] == 13


class TestRealize:
    def test_pentagon(self, capsys, files):
        code, obj, _ = run(capsys, "realize", files("c5.txt", "5: 0-1,1-2,2-3,3-4,0-4"))
        assert code == 0 and obj["dims"] == [3] and obj["membership"]["verdict"] == "contextual"

    def test_square_round_trip(self, capsys, files, tmp_path):
        out = tmp_path / "r.json"
        code, obj, _ = run(capsys, "realize", files("c4.txt", "4: 0-1,1-2,2-3,0-3"), "--out", out)
        assert code == 0
        assert obj["cycle_witness"]["value"] == pytest.approx(2 * np.sqrt(2))
        # the realization re-reads as a behavior and as a measurement set
        assert run(capsys, "membership", out)[0] == 20
        from ctxgraph.quantum import born_behavior

        state, s = io.measurement_set_from_obj(json.loads(out.read_text()))
        s.verify()
        b = born_behavior(state, s)
        ref = io.marginals_from_obj(obj)
        for c in b.contexts:
            assert np.array_equal(b.tables[c], ref.tables[c])

    def test_complete(self, capsys, files):
        code, _, err = run(capsys, "realize", files("k4.txt", "4: 0-1,0-2,0-3,1-2,1-3,2-3"))
        assert code == 11 and "no contextuality possible" in err

    def test_deterministic_given_seed(self, capsys, files):
        g = files("c6.txt", io.graph_to_obj(cycle_graph(6)))
        a = run(capsys, "realize", g, "--seed", 4)[1]
        b = run(capsys, "realize", g, "--seed", 4)[1]
        assert a == b


    def test_even_search_method(self, capsys, files):
        g = files("c6.txt", io.graph_to_obj(cycle_graph(6)))
        code, obj, _ = run(capsys, "realize", g, "--even-method", "search")
        assert code == 0 and obj["dims"] == [4] and obj["membership"]["verdict"] == "contextual"


def test_maxquantum(capsys, files):
    code, obj, _ = run(capsys, "maxquantum", files("c5.txt", "5: 0-1,1-2,2-3,3-4,0-4"), "--dim", 3, "--restarts", 2)
    assert code in (0, 30)
    assert obj["classical_bound"] == 3 and obj["value"] >= 3 - 1e-9


class TestFormats:
    def test_text_and_json_graphs_agree(self):
        assert io.parse_graph_text("4: 0-1,1-2,2-3,0-3") == io.graph_from_obj({"n": 4, "edges": [[0, 1], [1, 2], [2, 3], [0, 3]]})

    def test_bad_graph(self):
        with pytest.raises(GraphFormatError):
            io.graph_from_obj({"n": "4", "edges": []})

    def test_matrix_round_trip_is_bit_exact(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        back = io.decode_matrix(json.loads(json.dumps(io.encode_matrix(a))))
        assert np.array_equal(a, back)

    def test_numbers(self):
        assert io.decode_number("3/4") == Fraction(3, 4)
        assert io.encode_number(Fraction(3, 4)) == "3/4"
        with pytest.raises(io.FormatError):
            io.decode_number("x")

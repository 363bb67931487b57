import json
from fractions import Fraction

import pytest

from curlset.catalog import line_set, three_plane_set, two_line_set
from curlset.cli import RunReport, main, parse_instance
from curlset.mesh import PAField


def write_instance(path, E, **extra):
    obj = {"n": E.n, "elements": [e.to_json() for e in E], **extra}
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_parse_instance_minimal():
    inst = parse_instance('{"n": 4, "elements": [["1", 0, 0, 0, 0, 0]]}')
    assert len(inst.E) == 1 and inst.epsilon == Fraction(1, 100)
    assert inst.domain.volume == 1 and inst.partition_hint is None
    assert parse_instance(json.dumps(inst.to_json())).to_json() == inst.to_json()


@pytest.mark.parametrize(
    "text",
    [
        '{"n": 4, "elements": [[1, 0, 0]]}',
        '{"n": 4, "elements": [["1/0", 0, 0, 0, 0, 0]]}',
        '{"n": 4, "elements": [[1, 0, 0, 0, 0, 0]], "colour": 1}',
        '{"n": 4, "elements": [[1, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0]]}',
        '{"n": 4, "elements": [[1, 0, 0, 0, 0, 0]], "epsilon": "1"}',
        '{"n": 4, "elements": [[0.5, 0, 0, 0, 0, 0]]}',
        '{"n": 4, "elements": [{"n": 3, "k": 2, "coeffs": [1, 0, 0]}]}',
        '{"n": 4, "elements": [[1, 0, 0, 0, 0, 0]], "partition_hint": [[0], [1]]}',
        '{"n": 4,',
    ],
)
def test_parse_instance_rejects(text):
    with pytest.raises(ValueError):
        parse_instance(text)


def test_classify_three_plane(tmp_path, capsys):
    path = write_instance(tmp_path / "e.json", three_plane_set())
    code, rep = run(capsys, ["classify", "-i", path])
    assert code == 0 and rep["subcommand"] == "classify"
    res = rep["result"]
    assert res["verdict"] == "UNKNOWN" and res["span_dim"] == 3 and res["common_line"] is None
    assert len(rep["input_digest"]) == 64


def test_construct_then_verify(tmp_path, capsys):
    E = line_set(5)
    inst = write_instance(tmp_path / "e.json", E, epsilon="1/4")
    sol = str(tmp_path / "sol.json")
    code, rep = run(capsys, ["construct", "-i", inst, "-o", sol])
    assert code == 0 and rep["result"]["verification"]["verdict"] == "PASS"
    code, rep = run(capsys, ["verify", "-s", sol, "-i", inst, "--report", str(tmp_path / "r.json")])
    assert code == 0 and rep["result"]["verdict"] == "PASS"
    saved = json.loads((tmp_path / "r.json").read_text())
    assert saved == rep and RunReport.from_json(saved).to_json() == saved


def test_verify_corrupted_exits_one(tmp_path, capsys):
    E = line_set(3)
    inst = write_instance(tmp_path / "e.json", E, epsilon="1/2")
    sol = tmp_path / "sol.json"
    assert main(["construct", "-i", inst, "-o", str(sol), "--no-verify"]) == 0
    capsys.readouterr()
    mesh = json.loads(sol.read_text())
    mesh["cells"][0]["affine"]["offset"][0] = "7"
    sol.write_text(json.dumps(mesh))
    code, rep = run(capsys, ["verify", "-s", str(sol), "-i", inst])
    assert code == 1 and rep["result"]["verdict"] == "FAIL"
    assert "boundary" in rep["result"]["violations"] or "continuity" in rep["result"]["violations"]


def test_construct_refuses(tmp_path, capsys):
    path = write_instance(tmp_path / "e.json", three_plane_set())
    code, rep = run(capsys, ["construct", "-i", path, "-o", str(tmp_path / "s.json")])
    assert code == 1 and "error" in rep["result"]
    assert not (tmp_path / "s.json").exists()


def test_composite_via_hint(tmp_path, capsys):
    E, (p1, p2) = two_line_set(4)
    inst = write_instance(tmp_path / "e.json", E, partition_hint=[list(p1), list(p2)], epsilon="1/4")
    code, rep = run(capsys, ["classify", "-i", inst])
    assert rep["result"]["verdict"] == "SOLVABLE_COMPOSITE"
    code, rep = run(capsys, ["construct", "-i", inst, "-o", str(tmp_path / "s.json")])
    assert code == 0
    mesh = PAField.from_json(json.loads((tmp_path / "s.json").read_text()))
    assert mesh.covered_volume == Fraction(3, 4)


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert main(["classify", "-i", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 4, "elements": [[1, 0]]}')
    assert main(["classify", "-i", str(bad)]) == 2
    assert main(["lab", "lemma31", "--n", "3", "--trials", "1"]) == 2
    capsys.readouterr()


def test_lab_deterministic(capsys):
    code, a = run(capsys, ["lab", "lemma31", "--n", "4", "--trials", "3", "--seed", "42"])
    code2, b = run(capsys, ["lab", "lemma31", "--n", "4", "--trials", "3", "--seed", "42"])
    assert code == code2 == 0
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b and a["result"]["violations"] == 0
    code, c = run(capsys, ["lab", "thm61", "--n", "6", "--k", "2", "--trials", "2"])
    assert code == 0 and c["subcommand"] == "lab thm61" and c["result"]["probe"] == "forms"
    code, d = run(capsys, ["lab", "isotropy", "--n", "6", "--trials", "5"])
    assert code == 0 and d["result"]["violations"] == 0

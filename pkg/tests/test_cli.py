import json

import jsonschema
import pytest

from flagattr.cli import main
from flagattr.poset import POSET_JSON_SCHEMA


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_s3(capsys):
    code, out, _ = run(capsys, "verify", "--n", "3", "--dims", "1,2", "--diag", "1,2,3", "--seed", "42")
    assert code == 0
    assert "smale=bruhat: PASS (19 pairs)" in out
    assert out.rstrip().endswith("overall: PASS")


def test_bruhat_json(capsys):
    code, out, _ = run(capsys, "bruhat", "--n", "4", "--dims", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, POSET_JSON_SCHEMA)
    assert len(data["elements"]) == 6 and len(data["upper_sets"]) == 8


def test_projective_text(capsys):
    code, out, _ = run(capsys, "projective", "--diag", "1,2,5")
    assert code == 0
    assert "fixed components: 3" in out and "attractor pairs: 3" in out
    assert "5 < 2 < 1" in out


def test_projective_json_and_dot(capsys):
    code, out, _ = run(capsys, "projective", "--diag", "1,2,5", "--format", "json")
    data = json.loads(out)
    jsonschema.validate(data["component_order"], POSET_JSON_SCHEMA)
    assert data["attractor_lattice_size"] == 4
    code, out, _ = run(capsys, "projective", "--diag", "1,2,5", "--format", "dot")
    assert out.count("->") == 2


def test_network_outputs(capsys):
    code, out, _ = run(capsys, "network", "--n", "3", "--format", "json")
    data = json.loads(out)
    assert len(data["nodes"]) == 9
    jsonschema.validate(data["hasse"], POSET_JSON_SCHEMA)
    jsonschema.validate(data["fixed_point_order"], POSET_JSON_SCHEMA)
    top = data["nodes"].index(max(data["nodes"], key=len))
    assert all(row[top] == top for row in data["join"])
    code, out, _ = run(capsys, "network", "--diag", "1,2,3", "--space", "projective", "--format", "dot")
    assert code == 0 and out.count("->") == 3


def test_flag_command(capsys):
    code, out, _ = run(capsys, "flag", "--n", "3", "--samples", "200", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["fixed_flags"]) == 6 and data["cell_statistics"]["passed"]
    assert len(data["witnesses"]) >= 8


@pytest.mark.parametrize("args", [
    ("bruhat", "--n", "3", "--format", "text"),
    ("network", "--n", "3", "--format", "dot"),
    ("flag", "--n", "3", "--samples", "50", "--budget", "60"),
])
def test_output_is_deterministic(capsys, args):
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second and first


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    assert main(["bruhat", "--n", "3", "--format", "json", "--output", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert len(json.loads(path.read_text())["elements"]) == 6


@pytest.mark.parametrize("args", [
    ("verify", "--n", "3", "--diag", "1,1,2"),
    ("bruhat", "--n", "4", "--dims", "3,2"),
    ("flag", "--n", "3", "--diag", "1,2"),
    ("nonsense",),
    ("bruhat",),
    ("verify", "--n", "4", "--dims", "2", "--diag", "1,2,3,4"),
])
def test_invalid_input_exits_with_one(capsys, args):
    code, out, err = run(capsys, *args)
    assert code == 1 and out == "" and err.startswith("flagattr: error:")


def test_verification_failure_exits_with_two(capsys):
    # with a one-candidate budget most covers stay unwitnessed
    code, out, err = run(capsys, "verify", "--n", "3", "--budget", "1", "--samples", "20")
    assert code == 2
    assert "smale=bruhat: FAIL" in out and "verification failed" in err

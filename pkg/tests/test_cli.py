import json

import pytest

from conftest import CORPUS
from lienorm.cli import run_cli

AFF1 = str(CORPUS / "aff1.json")


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = run_cli([*argv, "--output", str(out)])
    return code, out.read_text()


def test_normalize_aff1_contains_normal_form(tmp_path):
    code, text = run(tmp_path, "normalize", "--input", AFF1, "--degree", "6")
    assert code == 0
    doc = json.loads(text)
    assert doc["normal_form"]["X0"]["terms"] == [
        {"alpha": [1, 0], "target": 1, "coeff": "-1"},
        {"alpha": [0, 1], "target": 2, "coeff": "-1/2"},
        {"alpha": [0, 2], "target": 1, "coeff": "1"},
    ]
    assert doc["X0"] == ["1"]
    assert doc["report"]["ok"]


def test_text_format(tmp_path):
    code, text = run(tmp_path, "normalize", "--input", AFF1, "--format", "text")
    assert code == 0
    assert "1 * y1^2 d/dx1" in text and "[PASS] equivalence" in text


def test_validate_broken_jacobi(tmp_path):
    doc = json.loads((CORPUS / "aff1.json").read_text())
    doc["algebra"] = {"basis": ["X0", "X1", "A"],
                      "structure_constants": [["X0", "X1", "X0", "1"], ["X0", "A", "X0", "1"], ["X1", "A", "X1", "1"]]}
    doc["representation"]["A"] = []
    doc["decomposition"]["g0"] = ["X0", "A"]
    doc["decomposition"]["r"] = ["X0", "A"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, text = run(tmp_path, "validate", "--input", str(bad))
    assert code == 2
    jac = next(c for c in json.loads(text)["report"]["checks"] if c["name"] == "jacobi")
    assert "('X0', 'X1', 'A')" in jac["witness"]


def test_normalize_invalid_problem_reports_error_object(tmp_path):
    doc = json.loads((CORPUS / "aff1.json").read_text())
    doc["representation"]["X0"][0]["coeff"] = "-2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, text = run(tmp_path, "normalize", "--input", str(bad))
    assert code == 2
    err = json.loads(text)["error"]
    assert err["stage"] == "validate" and err["type"] == "ValidationFailed"
    assert any(not c["passed"] for c in err["report"]["checks"])


@pytest.mark.parametrize("content", ["{not json", '{"n": 2}', '{"n": 2, "K": 3, "algebra": []}'])
def test_parse_errors_exit_5(tmp_path, content):
    bad = tmp_path / "bad.json"
    bad.write_text(content)
    code, text = run(tmp_path, "normalize", "--input", str(bad))
    assert code == 5
    assert "error" in json.loads(text)


def test_bad_scalar_position(tmp_path):
    doc = json.loads((CORPUS / "aff1.json").read_text())
    doc["representation"]["X0"][1]["coeff"] = "-1/0"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, text = run(tmp_path, "validate", "--input", str(bad))
    assert code == 5 and json.loads(text)["error"]["position"] == 3


def test_missing_input_file(tmp_path):
    code, text = run(tmp_path, "validate", "--input", str(tmp_path / "nope.json"))
    assert code == 5


def test_verify_hand_edited_coefficient(tmp_path):
    code, text = run(tmp_path, "normalize", "--input", AFF1)
    doc = json.loads(text)
    doc["normal_form"]["X0"]["terms"][2]["coeff"] = "2"
    edited = tmp_path / "edited.json"
    edited.write_text(json.dumps(doc))
    code, text = run(tmp_path, "verify", "--input", str(edited))
    assert code == 4
    failed = {c["name"]: c["witness"] for c in json.loads(text)["report"]["checks"] if not c["passed"]}
    assert "equivalence" in failed and "differs by" in failed["equivalence"]


def test_verify_rejects_non_result(tmp_path):
    code, _ = run(tmp_path, "verify", "--input", AFF1)
    assert code == 5


def test_straighten_command(tmp_path):
    code, text = run(tmp_path, "straighten", "--input", str(CORPUS / "hyperbolic.json"))
    assert code == 0
    doc = json.loads(text)
    assert doc["p"] == 2 and doc["q"] == 1
    assert all(t["alpha"] == [0, 0, 0] for t in doc["representation"]["P1"]["terms"])


def test_stamp_is_outside_payload(tmp_path):
    _, plain = run(tmp_path, "normalize", "--input", AFF1)
    _, stamped = run(tmp_path, "normalize", "--input", AFF1, "--stamp")
    stamped = json.loads(stamped)
    assert "generated_at" in stamped.pop("stamp")
    assert stamped == json.loads(plain)


def test_degree_override_changes_truncation(tmp_path):
    code, text = run(tmp_path, "normalize", "--input", AFF1, "--degree", "3")
    doc = json.loads(text)
    assert code == 0 and doc["K"] == 3
    assert doc["normal_form"]["X0"]["trusted_degree"] == 3

import json
import subprocess
import sys

import pytest

from contrakit.cli import main, module_from_json, run, SchemaError

Z12 = '{"invariants": {"rank": 0, "torsion": [12]}}'


def strip_timing(doc):
    doc = dict(doc)
    doc.pop("timing", None)
    return doc


def test_delta_on_z12():
    status, doc = run(["functor", "delta", "--module", Z12, "--s", "6"])
    assert status == 0 and doc["pass"]
    assert doc["result"]["output_atoms"] == "Z/4 + Z/3"


def test_envelope_of_z():
    status, doc = run(["envelope", "--module", '{"invariants": {"rank": 1}}'])
    assert status == 0
    assert doc["result"]["envelope"] == "Prod{all}[Zp^1]"


def test_presentation_payload():
    m = module_from_json('{"presentation": [[2, 0], [0, 3]]}')
    assert m.invariants == (0, (6,))


def test_schema_error_has_path(capsys):
    status = main(["check", "--s", "2", "--module", '{"invariants": {"torsion": [0]}}'])
    assert status == 2
    err = json.loads(capsys.readouterr().err)
    assert err["path"] == "$.invariants.torsion[0]"
    with pytest.raises(SchemaError):
        module_from_json('{"presentation": [[1, 2], [3]]}')


def test_parse_error_reports_position():
    status, doc = run(["classify", "Z/4 + + Q"])
    assert status == 2 and doc["error"] == "ParseError"
    assert doc["position"] == 6


def test_usage_errors():
    assert run([])[0] == 2
    assert run(["functor", "delta", "--module", Z12])[0] == 2
    assert run(["lab", "ce-quotient", "N=x"])[0] == 2
    assert run(["cover", "--name", "nothing"])[0] == 2


def test_lab_and_verify():
    status, doc = run(["lab", "ce-quotient", "p=2", "N=16", "M=12"])
    assert status == 0 and doc["result"]["report"]["pass"]
    status, doc = run(["verify", "--scale", "smoke", "--criteria", "2,6,8"])
    assert status == 0 and [c["criterion"] for c in doc["result"]["criteria"]] == [2, 6, 8]


def test_determinism_apart_from_timing():
    argv = ["lab", "nested-completion", "K=5", "trials=4", "--seed", "7"]
    assert strip_timing(run(argv)[1]) == strip_timing(run(argv)[1])


def test_text_format(capsys):
    assert main(["classify", "Q + Prufer(3)", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert 'result.classification.kind: "injective"' in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "contrakit.cli", "classify", "Z/8"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["input"] == "Z/8"

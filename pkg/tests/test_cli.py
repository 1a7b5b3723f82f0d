import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from nullplane import cli
from nullplane.algebras import builtin_text

from conftest import DROP_EXP_LEG


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _schema():
    return json.loads(resources.files("nullplane").joinpath("report.schema.json").read_text())


def test_verify_31_json_passes_and_validates(capsys):
    code, out, _ = run(capsys, "verify", "--algebra", "poincare-3+1-quantum", "--suite", "qybe,intertwine",
                       "--order", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, _schema())
    assert doc["summary"]["failed"] == 0
    assert {r["generator_or_pair"] for r in doc["reports"] if r["check"] == "intertwine"} >= {"P-", "F1", "F2", "J3"}


def test_verify_11_all_order_4(capsys):
    code, out, _ = run(capsys, "verify", "--algebra", "poincare-1+1-quantum", "--suite", "all", "--order", "4")
    assert code == 0
    assert out.strip().endswith("0 failed")


def test_order_out_of_range_is_a_config_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "--suite", "qybe", "--order", "9"])
    assert info.value.code == 2


def test_unknown_suite_and_algebra(capsys):
    code, _, err = run(capsys, "verify", "--suite", "qybee")
    assert code == 2 and "unknown suite" in err
    code, _, err = run(capsys, "verify", "--algebra", "nope")
    assert code == 2
    code, _, err = run(capsys, "verify", "--algebra", "funzS-1+1", "--suite", "qybe")
    assert code == 2 and "do not apply" in err


def test_failing_definitions_exit_1(tmp_path, capsys):
    path = tmp_path / "broken.pres"
    path.write_text(builtin_text("poincare-1+1-quantum").replace(*DROP_EXP_LEG))
    code, out, _ = run(capsys, "verify", "--definitions", str(path), "--suite", "hopf", "--order", "2")
    assert code == 1
    assert "FAIL poincare-1+1-quantum homomorphism [P-,K]" in out


def test_expand_examples(capsys):
    code, out, _ = run(capsys, "expand", "(* (gen K) (gen P+))", "--order", "2")
    assert code == 0
    assert out.strip() == ("(+ (* (gen P+) (gen K)) (gen P+) (z^ 1 (* (gen P+) (gen P+))) "
                           "(scal 2/3 (z^ 2 (* (gen P+) (gen P+) (gen P+)))))")
    assert run(capsys, "expand", "(one)")[1].strip() == "(one)"
    code, _, err = run(capsys, "expand", "(gen BAD)")
    assert code == 2 and "position" in err


def test_contract_commands(capsys):
    code, out, _ = run(capsys, "contract", "--map", "sl2-p11", "--order", "2")
    assert code == 0
    assert "[K,P+] = " in out and "Delta(P-) = " in out
    code, _, err = run(capsys, "contract", "--map", "unrescaled-p11", "--order", "2")
    assert code == 2 and "[K,P+]" in err


def _strip_volatile(doc):
    doc.pop("timestamp")
    for r in doc["reports"]:
        r.pop("elapsed_ms")
    return doc


def test_json_is_deterministic(capsys):
    args = ("verify", "--algebra", "poincare-2+1-quantum", "--suite", "hopf,cocommutators", "--order", "2",
            "--format", "json", "--seed", "7")
    a = json.loads(run(capsys, *args)[1])
    b = json.loads(run(capsys, *args)[1])
    assert json.dumps(_strip_volatile(a)) == json.dumps(_strip_volatile(b))


def test_text_and_json_agree(tmp_path, capsys):
    path = tmp_path / "broken.pres"
    path.write_text(builtin_text("poincare-1+1-quantum").replace(*DROP_EXP_LEG))
    base = ("verify", "--definitions", str(path), "--suite", "hopf,intertwine", "--order", "2")
    _, text, _ = run(capsys, *base)
    _, js, _ = run(capsys, *base, "--format", "json")
    doc = json.loads(js)
    from_json = sorted(cli.report_line(r) for r in doc["reports"])
    lines = text.strip().splitlines()
    from_text = sorted(lines[:-1])
    assert [l.split()[0] for l in from_json] == [l.split()[0] for l in from_text]
    assert from_json == from_text


def test_jobs_give_same_reports(capsys):
    args = ("verify", "--algebra", "poincare-1+1-quantum", "--suite", "hopf,qybe,duality", "--order", "2",
            "--format", "json")
    serial = _strip_volatile(json.loads(run(capsys, *args)[1]))
    parallel = _strip_volatile(json.loads(run(capsys, *args, "--jobs", "2")[1]))
    assert serial["reports"] == parallel["reports"]


def test_dump_matrices(tmp_path, capsys):
    code, _, _ = run(capsys, "verify", "--algebra", "poincare-1+1-quantum", "--suite", "rep",
                     "--dump-matrices", str(tmp_path))
    assert code == 0
    text = (tmp_path / "poincare-1+1-quantum.txt").read_text()
    assert "# matrix K 3x3" in text and "# matrix R 9x9" in text


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nullplane.cli", "verify", "--suite", "duality", "--order", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "r-from-T" in proc.stdout

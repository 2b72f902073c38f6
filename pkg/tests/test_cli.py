import json
import subprocess
import sys
from pathlib import Path

import pytest

from deformq.cli.main import main

GOLDEN = Path(__file__).parent / "golden" / "torus_report.json"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(out):
    header, _, rest = out.partition("\n")
    assert header == "%deformq-text 1"
    return json.loads(rest)


def test_verify_axioms_builtin(capsys):
    code, out, _ = run_cli(capsys, "verify-axioms", "--builtin", "star0", "--dim", "4",
                           "--order", "3", "--degree", "2")
    assert code == 0
    assert body(out)["status"] == "pass"


def test_adapt_and_emit(capsys, tmp_path):
    emitted = tmp_path / "adapted.txt"
    code, out, _ = run_cli(capsys, "adapt", "--builtin", "weyl", "--dim", "4", "--order", "3",
                           "--emit", str(emitted))
    assert code == 0
    assert emitted.read_text().startswith("%deformq-text 1\nstar ")
    # the emitted product can be fed back in
    code, out, _ = run_cli(capsys, "verify-axioms", "--product", str(emitted), "--degree", "2")
    assert code == 0


def test_reduce_and_commutant(capsys):
    code, out, _ = run_cli(capsys, "reduce", "--builtin", "star0", "--dim", "4", "--degree", "2")
    assert code == 0 and body(out)["data"]["reduced"]
    code, out, _ = run_cli(capsys, "commutant", "--builtin", "torus'", "--order", "4",
                           "--degree", "2")
    assert code == 0
    assert body(out)["data"]["dimension"] > 0


def test_fedosov_build_config(capsys, tmp_path):
    cfg = tmp_path / "fed.json"
    cfg.write_text(json.dumps({"pairs": [["q", "p"]], "order": 2, "omega": {"1": {"q,p": "(3)"}}}))
    code, out, _ = run_cli(capsys, "fedosov-build", "--config", str(cfg))
    assert code == 0
    code, out, _ = run_cli(capsys, "fedosov-build", "--order", "2")
    assert code == 0
    assert any(r["check"] == "equals the Weyl product" for r in body(out)["results"])


def test_gutt_check_and_lie_table(capsys, tmp_path):
    table = tmp_path / "lie.json"
    table.write_text(json.dumps({"basis": ["a", "b"], "brackets": {"a,b": {"a": "1"}}}))
    code, out, _ = run_cli(capsys, "gutt-check", "--config", str(table), "--order", "2",
                           "--degree", "2")
    assert code == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"basis": ["a", "b", "c"],
                               "brackets": {"a,b": {"a": "1"}, "a,c": {"b": "1"}}}))
    code, _, err = run_cli(capsys, "gutt-check", "--config", str(bad))
    assert code == 2 and "Jacobi" in err


def test_casebook_torus_matches_golden(capsys):
    code, out, _ = run_cli(capsys, "casebook", "torus")
    assert code == 0
    assert out == GOLDEN.read_text()


def test_roundtrip_command_deterministic(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "roundtrip", "--count", "50", "--seed", "3")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


@pytest.mark.parametrize("argv,needle", [
    (["verify-axioms"], "product"),
    (["verify-axioms", "--builtin", "nope"], "unknown product"),
    (["verify-axioms", "--builtin", "star0", "--dim", "3"], "dim"),
    (["verify-axioms", "--builtin", "star0", "--order", "-1"], "order"),
    (["verify-axioms", "--builtin", "star0", "--product", "weyl"], "either"),
])
def test_bad_input_exit_code(capsys, argv, needle):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert err.startswith("deformq: error:") and needle in err


def test_bad_chart_files(capsys, tmp_path):
    dup = tmp_path / "dup.json"
    dup.write_text(json.dumps({"pairs": [["q", "p"]], "leaves": [["q", "y"]]}))
    code, _, err = run_cli(capsys, "adapt", "--builtin", "star0", "--chart", str(dup))
    assert code == 2 and "duplicate" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{\"pairs\": [")
    code, _, err = run_cli(capsys, "adapt", "--builtin", "star0", "--chart", str(broken))
    assert code == 2 and "line 1" in err
    code, _, err = run_cli(capsys, "adapt", "--builtin", "star0", "--chart",
                           str(tmp_path / "missing.json"))
    assert code == 2


def test_header_mismatch_in_product_file(capsys, tmp_path):
    f = tmp_path / "prod.txt"
    f.write_text("%deformq-text 7\nstar <q, p> N=1\n")
    code, _, err = run_cli(capsys, "verify-axioms", "--product", str(f))
    assert code == 2 and "unsupported header" in err


def test_failing_check_exits_one(capsys, tmp_path):
    # star0 is not adapted to the chart whose transverse variable is q
    chart = tmp_path / "chart.json"
    chart.write_text(json.dumps({"pairs": [], "leaves": [["p", "q"]]}))
    code, out, err = run_cli(capsys, "reduce", "--builtin", "weyl", "--chart", str(chart),
                             "--degree", "2")
    assert code == 1
    assert "check failed" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "deformq.cli", "roundtrip", "--count", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("%deformq-text 1")

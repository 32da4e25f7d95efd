import json
import subprocess
import sys
from pathlib import Path

import pytest

from operant.cli import DEFAULT_SEED, SCHEMA_VERSION, main

SPECS = Path(__file__).resolve().parents[1] / "specs"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out


def report(argv, capsys):
    code, out = run(argv, capsys)
    return code, json.loads(out.out)


def test_analyze_coupled_pair(capsys):
    code, rep = report(["analyze", "--input", SPECS / "coupled_pair.json"], capsys)
    assert code == 0
    assert rep["schema_version"] == SCHEMA_VERSION and rep["seed"] == DEFAULT_SEED
    assert rep["status"] == "OK"
    v = rep["verdict"]
    assert v["torsion_free"] and v["trajectory_controllable"] and v["behaviorally_controllable"]
    res = rep["residuals"]
    assert res["basis_roundtrip"] < 1e-8 and res["reconstruction_modulo_rows"] < 1e-8
    assert res["lift_identity_residual"] < 1e-8


def test_analyze_pinned_string(capsys):
    code, rep = report(["analyze", "--input", SPECS / "pinned_string.json"], capsys)
    assert code == 0
    assert rep["verdict"]["decomposition"] == "has_torsion"
    assert not rep["verdict"]["trajectory_controllable"]
    assert rep["flat_output"] is None
    assert rep["rank_drop_points"]


def test_analyze_is_deterministic(capsys):
    args = ["analyze", "--input", SPECS / "coupled_pair.json", "--seed", "11"]
    _, a = report(args, capsys)
    _, b = report(args, capsys)
    a.pop("timing"), b.pop("timing")
    assert a == b


def test_invalid_spec_exits_1(capsys):
    code, out = run(["analyze", "--input", SPECS / "sigma_zero.json"], capsys)
    assert code == 1
    assert "sigma" in out.err


def test_missing_file_exits_1(capsys, tmp_path):
    code, _ = run(["analyze", "--input", tmp_path / "nope.json"], capsys)
    assert code == 1


def test_malformed_json_exits_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = run(["gcd", bad, SPECS / "S1.json"], capsys)
    assert code == 1 and "invalid JSON" in out.err


def test_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--xi", "middle", "--input", "x.json"])
    assert exc.value.code == 1


def test_gcd_command(capsys):
    code, rep = report(["gcd", SPECS / "S1.json", SPECS / "C1_plus_1.json"], capsys)
    assert code == 0 and rep["verified"]
    assert rep["certificate"]["engine"] == "division"


def test_gcd_tag_mismatch_exits_1(capsys):
    code, _ = run(["gcd", SPECS / "S1.json", SPECS / "C1_plus_1_wave.json"], capsys)
    assert code == 1


def test_lift_command(capsys, tmp_path):
    out = tmp_path / "lift.json"
    code, _ = run(["lift", SPECS / "p1.json", SPECS / "p2.json", "--output", out], capsys)
    rep = json.loads(out.read_text())
    assert code == 0 and rep["coprime"] and rep["status"] == "OK"


def test_lift_non_coprime_reports_gcd(capsys):
    code, rep = report(["lift", SPECS / "S1_wave.json", SPECS / "S1_wave.json"], capsys)
    assert code == 0 and rep["coprime"] is False


def test_kernel_check_pass_and_fail(capsys, tmp_path):
    csv = tmp_path / "k.csv"
    code, rep = report(["kernel-check", "--a", "1", "--b", "1", "--c", "0", "--csv", csv], capsys)
    assert code == 0 and rep["status"] == "PASS" and rep["support_violations"] == 0
    assert csv.read_text().startswith("t,S")
    code, rep = report(["kernel-check", "--tol", "1e-12", "--nodes", "8"], capsys)
    assert code == 2 and rep["status"] == "FAIL"


def test_kernel_check_series_mode(capsys):
    code, rep = report(["kernel-check", "--a", "0", "--b", "1", "--c", "1/2"], capsys)
    assert code == 0 and rep["mode"] == "series"


def test_text_format(capsys):
    code, out = run(["gcd", SPECS / "S1.json", SPECS / "C1_plus_1.json", "--format", "text"], capsys)
    assert code == 0 and "status: OK" in out.out


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "operant.cli", "gcd", str(SPECS / "S1.json"), str(SPECS / "C1_plus_1.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "OK"

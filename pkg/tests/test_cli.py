import json
import subprocess
import sys

import pytest

from treetop.cli import dumps, main

from conftest import DATA


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_entropy_golden(capsys):
    code, out, _ = run(["entropy", DATA / "golden.mat", "--depth", 6], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["verdict"] == "strictly_greater"
    assert rep["upper_bound"] <= 0.53058
    assert list(rep)[:4] == ["k", "d", "M", "m"]


def test_entropy_full_shift(capsys):
    code, out, _ = run(["entropy", DATA / "fullshift2.mat", "--depth", 3], capsys)
    rep = json.loads(out)
    assert rep["verdict"] == "equal"
    assert rep["line_entropy"] == rep["lower_bound_perron"] == pytest.approx(0.69314718056)
    assert rep["upper_bound"] == pytest.approx(0.69314718056)


def test_entropy_staircase_approaches_log2(capsys):
    _, out, _ = run(["entropy", DATA / "staircase.mat", "--depth", 8], capsys)
    hs = [e["h_n"] for e in json.loads(out)["h_sequence"]]
    assert all(b < a for a, b in zip(hs, hs[1:]))
    assert 0 < hs[-1] - 0.69314718056 < 1e-3


def test_entropy_with_certificate_and_log_base(capsys):
    _, out, _ = run(["entropy", DATA / "golden.mat", "--eps", 0.1, "--log-base", "2"], capsys)
    rep = json.loads(out)
    assert rep["lower_bound_certified"] > rep["lower_bound_perron"]


def test_output_is_byte_identical(capsys):
    argv = ["analyze", DATA / "sse_A.mat", "--depth", 5]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_float_format():
    assert dumps({"x": 0.1 + 0.2, "y": float("inf")}) == '{\n  "x": 0.3,\n  "y": null\n}\n'


def test_certify(capsys):
    code, out, _ = run(["certify", DATA / "golden.mat", "--eps", 0.1], capsys)
    cert = json.loads(out)
    assert code == 0
    assert list(cert) == ["eps", "N", "S_prefix", "kappa", "C_value", "lower_bound", "line_entropy", "margin"]
    assert cert["margin"] > 1e-5


def test_certify_refusal_exit_3(capsys):
    code, _, err = run(["certify", DATA / "fullshift2.mat"], capsys)
    assert code == 3 and "M == m" in err


def test_gapset(capsys):
    code, out, _ = run(["gapset", DATA / "golden.mat", "--eps", 0.1, "--depth", 10], capsys)
    gs = json.loads(out)
    assert code == 0 and gs["windows_ok"] and gs["N"] == 1


def test_enumerate(capsys):
    code, out, _ = run(["enumerate", DATA / "golden.mat", "--depth", 1, "--limit", 2], capsys)
    res = json.loads(out)
    assert code == 0 and res["count"] == 5 and len(res["sample"]) == 2


def test_enumerate_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("TREETOP_BUDGET", "10")
    code, _, err = run(["enumerate", DATA / "golden.mat", "--depth", 2], capsys)
    assert code == 3 and "budget" in err


def test_recode_roundtrip(capsys, tmp_path):
    code, out, _ = run(["recode", DATA / "golden.mat", "--m", 2], capsys)
    assert code == 0 and out.startswith("# ")
    path = tmp_path / "g2.mat"
    path.write_text(out)
    code, out, _ = run(["entropy", path, "--depth", 3], capsys)
    assert code == 0 and json.loads(out)["k"] == 3


def test_recode_forbidden(capsys):
    code, out, _ = run(["recode", "--alphabet", 2, "--forbidden", "11"], capsys)
    assert code == 0 and out.endswith("2 2\n1 1\n1 0\n")


def test_verify_golden(capsys):
    code, out, _ = run(["verify", DATA / "golden.mat", "--depth", 3, "--all"], capsys)
    res = json.loads(out)
    assert code == 0 and res["passed"]


def test_verify_sse_matrix_gamma_chain(capsys):
    code, out, _ = run(["verify", DATA / "sse_A.mat", "--depth", 10], capsys)
    checks = {c["name"]: c["passed"] for c in json.loads(out)["checks"]}
    assert code == 0 and checks["gamma chain"]


def test_verify_two_golden_strict(capsys):
    code, out, _ = run(["verify", DATA / "two_golden.mat", "--depth", 4], capsys)
    comp = next(c for c in json.loads(out)["checks"] if c["name"] == "component comparison")
    assert code == 0 and "strict" in comp["detail"]


def test_verify_failure_exit_1(capsys, monkeypatch):
    from treetop import verify

    monkeypatch.setattr(verify, "_bracket_check", lambda *a: verify.Check("bracket", False, "forced"))
    code, _, err = run(["verify", DATA / "golden.mat", "--depth", 2], capsys)
    assert code == 1 and "forced" in err


def test_sse_check(capsys):
    files = [DATA / f for f in ("sse_A.mat", "sse_B.mat", "sse_R.txt", "sse_S.txt")]
    code, out, _ = run(["sse-check", *files], capsys)
    res = json.loads(out)
    assert code == 0 and res == {"valid": True, "rho_A": 2.0, "rho_B": 2.0}


def test_sse_check_identity_witness(capsys, tmp_path):
    (tmp_path / "I.txt").write_text("2 2\n1 0\n0 1\n")
    (tmp_path / "G.txt").write_text("2 2\n1 1\n1 0\n")
    g = DATA / "golden.mat"
    code, out, _ = run(["sse-check", g, g, tmp_path / "I.txt", tmp_path / "G.txt"], capsys)
    assert code == 0 and json.loads(out)["valid"]


def test_sse_check_dimension_mismatch(capsys):
    files = [DATA / f for f in ("sse_A.mat", "sse_B.mat", "sse_S.txt", "sse_R.txt")]
    code, _, _ = run(["sse-check", *files], capsys)
    assert code == 2


def test_parse_error_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.mat"
    bad.write_text("2 2\n1 1\n1 3\n")
    code, _, err = run(["entropy", bad], capsys)
    assert code == 2 and "line 3" in err


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, _ = run(["entropy", tmp_path / "nope.mat"], capsys)
    assert code == 2


def test_unknown_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["entropy", str(DATA / "golden.mat"), "--bogus"])
    assert info.value.code == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "treetop.cli", "entropy", str(DATA / "fullshift2.mat"), "--depth", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "equal"

import json
import subprocess
import sys

import pytest

from wignercorr import cli


def run(*argv):
    return cli.main(list(argv))


def test_identities_exit_zero(tmp_path, capsys):
    out = tmp_path / "id.json"
    assert run("identities", "--smax", "100", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "identities" and doc["result"]["pass"]
    man = json.loads((tmp_path / "id.json.manifest.json").read_text())
    assert man["argv"] == ["identities", "--smax", "100"]
    assert set(man) >= {"argv", "config", "version", "timestamp", "seeds", "outputs"}


def test_regime_rejection_and_override(capsys):
    assert run("montecarlo", "--n", "1", "--chi1", "0.9", "--chi2", "0.9", "--law", "gaussian",
               "--samples", "200") == 4
    assert "regime" in capsys.readouterr().err
    assert run("montecarlo", "--n", "1", "--s", "1", "--law", "gaussian", "--samples", "4000", "--seed", "2") == 0
    doc = json.loads(capsys.readouterr().out)
    (row,) = doc["result"]["per_law"]
    assert abs(row["K_mean"] - 0.125) <= 3 * row["K_stderr"]
    assert doc["result"]["comparisons"] == []


def test_capacity_and_domain_exit_codes(capsys):
    assert run("oracle", "--n", "2", "--quantity", "expr", "--expr", "L14") == 3
    assert run("majorant", "--n", "3", "--check", "moment", "--h", "1/16") == 4
    assert run("paths", "--n", "4", "--s1", "1", "--s2", "1") == 3


def test_majorant_example(capsys):
    assert run("majorant", "--n", "10", "--s0", "4", "--h", "1/8") == 0
    doc = json.loads(capsys.readouterr().out)
    assert all(p["margin_num"] >= 0 for p in doc["result"]["points"])


def test_failed_check_sets_exit_status(capsys):
    # closed forms fail inside the literal regime here (q at r = 2, s = 2)
    assert run("majorant", "--n", "1000", "--check", "pqt", "--smax", "3", "--chi", "1/128") == cli.CHECK_FAILED


def test_rational_inputs_are_exact(capsys):
    run("oracle", "--n", "3", "--quantity", "moment", "--smax", "2")
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["moments"] == {"0": "1", "2": "1/4", "4": "19/144"}


def test_manifest_replay_is_bitwise(tmp_path):
    first = tmp_path / "a.json"
    argv = ["montecarlo", "--n", "12", "--s", "2", "--law", "gaussian", "--law", "rademacher",
            "--samples", "300", "--seed", "9"]
    assert run("--out", str(first), *argv) == 0
    second = tmp_path / "b.json"
    assert run("--from-manifest", f"{first}.manifest.json", "--workers", "2", "--out", str(second)) == 0
    assert first.read_bytes() == second.read_bytes()


def test_manifest_replay_rejects_extra_flags(tmp_path):
    first = tmp_path / "a.json"
    run("--out", str(first), "oracle", "--n", "2")
    with pytest.raises(SystemExit):
        run("--from-manifest", f"{first}.manifest.json", "oracle", "--n", "3")


def test_csv_sweep_one_row_per_point_and_law(capsys):
    # s = 1 here, so laws must share the fourth moment to agree
    assert run("universality", "--n", "6", "8", "--chi", "1/8", "--law", "gaussian", "--law", "three-point:1/3",
               "--samples", "150", "--format", "csv") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("n,chi1,chi2,s1,s2,law,K_mean")
    assert len(lines) == 1 + 2 * 2


def test_report_round_trip(tmp_path, capsys):
    a, b = tmp_path / "id.json", tmp_path / "mc.json"
    run("identities", "--smax", "10", "--rmax", "5", "--out", str(a))
    run("montecarlo", "--n", "5", "--s", "1", "--samples", "150", "--out", str(b))
    capsys.readouterr()
    assert run("report", str(tmp_path / "*.json"), "--format", "json") == 0
    rep = json.loads(capsys.readouterr().out)["result"]
    kinds = [s["kind"] for s in rep["sections"]]
    assert sorted(kinds) == ["identities", "montecarlo"]
    for sec in rep["sections"]:
        raw = json.loads(open(sec["file"]).read())["result"]
        assert sec["result"] == raw
    assert run("report", str(a), str(b)) == 0
    text = capsys.readouterr().out
    assert "== identities [PASS]" in text and "== montecarlo [PASS]" in text
    assert "comparisons: (none)" in text
    raw_mean = json.loads(b.read_text())["result"]["per_law"][0]["K_mean"]
    assert json.dumps(raw_mean) in text


def test_report_flags_failures_and_corruption(tmp_path, capsys):
    bad = tmp_path / "fail.json"
    run("majorant", "--n", "1000", "--check", "pqt", "--smax", "3", "--chi", "1/128", "--out", str(bad))
    assert run("report", str(bad)) == cli.CHECK_FAILED
    assert "<-- failed" in capsys.readouterr().out
    broken = tmp_path / "broken.json"
    broken.write_text('{"kind": "x"')
    assert run("report", str(broken)) == 6
    assert "broken.json" in capsys.readouterr().err
    other = tmp_path / "other.json"
    other.write_text('{"a": 1}')
    assert run("report", str(other)) == 6


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "wignercorr", "oracle", "--n", "2", "--quantity", "expr",
                        "--expr", "A2[1,1] A2[2,2]"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["result"]["value"] == "5/64"

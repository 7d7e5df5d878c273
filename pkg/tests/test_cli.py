import json

import pytest

from semiroot import cli, oracle, root_datum


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_round_trip_exit_codes(tmp_path, capsys):
    oracle_path = tmp_path / "sl2.oracle"
    report_path = tmp_path / "report.json"
    code, _, _ = run(
        capsys, "gen-oracle", "--datum", "sl2", "--bound", "4", "--out", str(oracle_path)
    )
    assert code == 0
    code, out, _ = run(
        capsys, "reconstruct", "--oracle", str(oracle_path), "--out", str(report_path)
    )
    assert code == 0
    assert "certified" in out
    code, out, _ = run(capsys, "verify", "--datum", "sl2", "--report", str(report_path))
    assert code == 0
    assert "isomorphic" in out


def test_verify_wrong_group_fails(tmp_path, capsys):
    oracle_path = tmp_path / "sl2.oracle"
    report_path = tmp_path / "report.json"
    run(capsys, "gen-oracle", "--datum", "sl2", "--out", str(oracle_path))
    run(capsys, "reconstruct", "--oracle", str(oracle_path), "--out", str(report_path))
    code, out, _ = run(capsys, "verify", "--datum", "pgl2", "--report", str(report_path))
    assert code == 1
    assert "not isomorphic" in out


def test_verify_uncertified_report(tmp_path, capsys):
    oracle_path = tmp_path / "small.oracle"
    report_path = tmp_path / "report.json"
    run(capsys, "gen-oracle", "--datum", "sl2xpgl2", "--bound", "2",
        "--out", str(oracle_path))
    code, _, _ = run(
        capsys, "reconstruct", "--oracle", str(oracle_path), "--out", str(report_path)
    )
    assert code == 1
    code, out, _ = run(capsys, "verify", "--datum", "sl2xpgl2", "--report", str(report_path))
    assert code == 1
    assert "not certified" in out


def test_datum_file_argument(tmp_path, capsys):
    blob = {
        "rank": 1,
        "simple_roots": [[2]],
        "simple_coroots": [[1]],
        "name": "sl2-copy",
    }
    path = tmp_path / "datum.json"
    path.write_text(json.dumps(blob))
    code, out, _ = run(capsys, "tensor", "--datum", str(path), "--left", "2", "--right", "2")
    assert code == 0
    assert out == "4:1\n2:1\n0:1\n"


def test_tensor_golden_sl3(capsys):
    code, out, _ = run(
        capsys, "tensor", "--datum", "sl3", "--left", "1,0", "--right", "0,1"
    )
    assert code == 0
    assert out == "1,1:1\n0,0:1\n"


def test_tensor_rejects_nondominant(capsys):
    code, _, err = run(capsys, "tensor", "--datum", "sl2", "--left", "-1", "--right", "2")
    assert code == 2
    assert "not dominant" in err


def test_gen_oracle_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.oracle", tmp_path / "b.oracle"
    run(capsys, "gen-oracle", "--datum", "sl3", "--bound", "2", "--seed", "6", "--out", str(a))
    run(capsys, "gen-oracle", "--datum", "sl3", "--bound", "2", "--seed", "6", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_gen_oracle_provenance(tmp_path, capsys):
    out = tmp_path / "t.oracle"
    prov_path = tmp_path / "prov.json"
    run(capsys, "gen-oracle", "--datum", "sl2", "--bound", "3", "--out", str(out),
        "--provenance-out", str(prov_path))
    prov = json.loads(prov_path.read_text())
    table = oracle.parse_oracle(out.read_text())
    assert set(prov) == set(table.labels)
    assert sorted(tuple(v) for v in prov.values()) == [(0,), (1,), (2,), (3,)]


def test_check_props_passes(capsys):
    code, out, _ = run(capsys, "check-props", "--datum", "sl2", "--max-coord", "3",
                       "--max-n", "2")
    assert code == 0
    assert "result: PASS" in out
    assert "disagree=0" in out


def test_check_props_skips_cover_for_torus(capsys):
    code, out, _ = run(capsys, "check-props", "--datum", "torus1", "--max-coord", "2",
                       "--max-n", "1")
    assert code == 0
    assert "cover: skipped" in out


def test_threads_flag_does_not_change_output(capsys):
    _, base, _ = run(capsys, "check-props", "--datum", "sl2", "--max-coord", "2",
                     "--max-n", "1")
    _, threaded, _ = run(capsys, "--threads", "3", "check-props", "--datum", "sl2",
                         "--max-coord", "2", "--max-n", "1")
    assert base == threaded


def test_malformed_oracle_diagnoses_line(tmp_path, capsys):
    bad = tmp_path / "bad.oracle"
    bad.write_text("labels: a b\nunit: a\nwhat is this\n")
    code, _, err = run(capsys, "reconstruct", "--oracle", str(bad))
    assert code == 2
    assert "line 3" in err


def test_missing_files(capsys):
    code, _, err = run(capsys, "reconstruct", "--oracle", "/nonexistent.oracle")
    assert code == 2
    code, _, err = run(capsys, "verify", "--datum", "sl2", "--report", "/nonexistent.json")
    assert code == 2
    code, _, err = run(capsys, "gen-oracle", "--datum", "missing_fixture")
    assert code == 2


def test_rejected_table_reports_validation_stage(tmp_path, capsys):
    src = tmp_path / "good.oracle"
    run(capsys, "gen-oracle", "--datum", "sl2", "--bound", "3", "--out", str(src))
    lines = src.read_text().splitlines()
    for i, line in enumerate(lines):
        if line.startswith("prod") and line.endswith("*1"):
            lines[i] = line[:-1] + "5"
            break
    bad = tmp_path / "bad.oracle"
    bad.write_text("\n".join(lines) + "\n")
    report_path = tmp_path / "report.json"
    code, out, _ = run(capsys, "reconstruct", "--oracle", str(bad), "--out", str(report_path))
    assert code == 1
    blob = json.loads(report_path.read_text())
    assert blob["verdict"] in {"rejected", "failed"}
    assert blob["stage"]


def test_env_overrides(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SEMIROOT_BOUND", "2")
    out = tmp_path / "t.oracle"
    run(capsys, "gen-oracle", "--datum", "sl2", "--out", str(out))
    table = oracle.parse_oracle(out.read_text())
    assert len(table.labels) == 3
    monkeypatch.setenv("SEMIROOT_BOUND", "nope")
    code, _, err = run(capsys, "gen-oracle", "--datum", "sl2", "--out", str(out))
    assert code == 2
    assert "SEMIROOT_BOUND" in err


def test_flag_beats_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SEMIROOT_BOUND", "2")
    out = tmp_path / "t.oracle"
    run(capsys, "gen-oracle", "--datum", "sl2", "--bound", "4", "--out", str(out))
    table = oracle.parse_oracle(out.read_text())
    assert len(table.labels) == 5


def test_report_json_sorted(tmp_path, capsys):
    oracle_path = tmp_path / "sl2.oracle"
    report_path = tmp_path / "report.json"
    run(capsys, "gen-oracle", "--datum", "sl2", "--out", str(oracle_path))
    run(capsys, "reconstruct", "--oracle", str(oracle_path), "--out", str(report_path))
    text = report_path.read_text()
    blob = json.loads(text)
    assert json.dumps(blob, indent=2, sort_keys=True) + "\n" == text
    assert blob["rank"] == 1
    assert blob["inferred_bound"] == 4

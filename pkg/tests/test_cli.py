import csv
import json

import pytest

from fareystat import checks, cli
from fareystat.report import VerificationReport


def run(args, capsys=None):
    code = cli.main(args)
    out = capsys.readouterr() if capsys else None
    return code, out


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_farey_gen_stdout(capsys):
    code, out = run(["farey", "gen", "--dim", "1", "--level", "5"], capsys)
    assert code == 0
    lines = out.out.splitlines()
    assert lines[0] == "p1,q" and len(lines) == 11


def test_farey_gen_file_with_sidecar(tmp_path):
    out = tmp_path / "f.csv"
    assert cli.main(["farey", "gen", "--dim", "2", "--level", "4", "--out", str(out)]) == 0
    assert rows(out)[0] == ["p1", "p2", "q"]
    meta = json.loads((tmp_path / "f.csv.meta.json").read_text())
    assert meta["options"]["level"] == 4 and "artifact_version" in meta


def test_limits_hall_grid(tmp_path):
    out = tmp_path / "hall.csv"
    assert cli.main(["limits", "hall", "--s-grid", "0:4:0.01", "--out", str(out)]) == 0
    data = rows(out)
    assert data[0] == ["s", "cdf", "density", "quadrature"]
    assert len(data) == 402
    assert float(data[1][1]) == 1.0 and data[-1][0] == "4"
    for s, cdf, _, quad in data[1:]:
        assert abs(float(cdf) - float(quad)) < 1e-8


def test_limits_triangle(capsys):
    code, out = run(["limits", "triangle", "--s", "0.607927101854", "--lambda", "0.64"], capsys)
    assert code == 0
    closed, oracle = map(float, out.out.splitlines()[1].split(",")[2:])
    assert closed == pytest.approx(0.53125, abs=1e-9) and oracle == pytest.approx(closed, abs=1e-10)


def test_stats_outputs_are_byte_identical(tmp_path):
    args = ["stats", "void", "--level", "300", "--samples", "2000", "--seed", "4",
            "--set", "A:boxoc:0,1.5", "--set", "D:box:0,0.5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.meta.json").read_bytes() == (tmp_path / "b.csv.meta.json").read_bytes()
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["seed"] == 4 and meta["statistic"]["D"].startswith("box:")
    masses = [float(r[1]) for r in rows(a)[1:]]
    assert sum(masses) == pytest.approx(1.0, abs=1e-9)


def test_stats_point_s_grid(tmp_path):
    out = tmp_path / "p.csv"
    args = ["stats", "point", "--level", "20", "--dim", "2", "--set", "ball:0.5",
            "--s-grid", "0.5:1:0.25", "--out", str(out)]
    assert cli.main(args) == 0
    data = rows(out)
    assert data[0] == ["s", "k", "mass"]
    assert {r[0] for r in data[1:]} == {"0.5", "0.75", "1"}


def test_stats_gaps_json(capsys):
    code, out = run(["stats", "gaps", "--level", "100", "--s-grid", "0:2:0.5", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out.out)
    assert doc["columns"] == ["s", "survival", "hall_cdf"]
    assert doc["rows"][0] == ["0", "1", "1"]


@pytest.mark.parametrize("args", [
    ["stats", "void", "--level", "0"],
    ["stats", "void", "--level", "10", "--s-grid", "1:0:0.1"],
    ["stats", "void", "--level", "10", "--set", "A:disc:1"],
    ["stats", "void", "--level", "10", "--dim", "2", "--set", "A:box:0,1"],
    ["stats", "gaps", "--level", "10", "--dim", "2"],
    ["limits", "triangle", "--s", "1", "--lambda", "2"],
    ["verify", "nothing"],
    ["farey"],
])
def test_usage_errors_exit_2(args, capsys):
    assert cli.main(args) == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nlevel = 5\ndim=1\n")
    code, out = run(["farey", "gen", "--config", str(cfg)], capsys)
    assert code == 0 and len(out.out.splitlines()) == 11
    code, out = run(["farey", "gen", "--config", str(cfg), "--level", "3"], capsys)
    assert len(out.out.splitlines()) == 5
    cfg.write_text("bogus = 1\n")
    assert cli.main(["farey", "gen", "--config", str(cfg), "--level", "3"]) == 2
    assert cli.main(["farey", "gen", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_threads_env(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.resolve_threads(None) == 3
    assert cli.resolve_threads(2) == 2
    monkeypatch.setenv(cli.THREADS_ENV, "zero")
    with pytest.raises(cli.UsageError):
        cli.resolve_threads(None)


def test_s_grid_parsing():
    assert cli.s_grid("0:1:0.1") == [0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
    assert len(cli.s_grid("0:4:0.01")) == 401


def test_verify_zeta_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, text = run(["verify", "zeta", "--out", str(out)], capsys)
    assert code == 0 and "[PASS]" in text.out
    doc = json.loads(out.read_text())
    assert doc["passed"] and len(doc["checks"]) == 2


def test_verify_equidist_table(tmp_path, capsys):
    out = tmp_path / "eq.json"
    code, _ = run(["verify", "equidist", "--tol-profile", "quick", "--levels", "100,400,1600",
                   "--out", str(out)], capsys)
    assert code == 0
    table = json.loads(out.read_text())["equidist_table"]
    assert [r["levels"] for r in table] == [[100, 400, 1600]] * 3
    assert {"lhs", "rhs", "gaps"} <= set(table[0])


def test_verify_failure_exits_1(monkeypatch, capsys):
    bad = VerificationReport.compare("broken", 1.0, 0.0, 0.1)
    monkeypatch.setattr(checks, "run_checks", lambda which, profile: [bad])
    code, out = run(["verify", "hall"], capsys)
    assert code == 1 and "FAIL" in out.out


def test_nt_commands(capsys):
    code, out = run(["nt", "kloosterman", "--m1", "1", "--m2", "1", "--q", "3"], capsys)
    assert code == 0 and float(out.out) == pytest.approx(-1.0)
    code, out = run(["nt", "zeta", "--s", "1"], capsys)
    assert code == 2
    code, out = run(["nt", "table", "--limit", "12"], capsys)
    assert out.out.splitlines()[-1] == "12,4,0,4"

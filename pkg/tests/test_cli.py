import csv
import json
import math
from fractions import Fraction

import pytest

from hardylab import HardyParams, derive_exponents
from hardylab import cli


def run(argv, capsys):
    rc = cli.main([str(a) for a in argv])
    return rc, capsys.readouterr()


def test_exponents_report(capsys):
    rc, out = run(["exponents", "--N", 3, "--kappa", "3/16", "--q", 2], capsys)
    assert rc == cli.EXIT_OK
    rep = json.loads(out.out)
    assert rep["exponents"]["alpha_plus"] == 1.5
    assert rep["exponents"]["q_c"] == pytest.approx(15 / 7, rel=1e-15)
    assert rep["subcritical"] is True


def test_invalid_kappa_is_validation_failure(capsys):
    rc, out = run(["exponents", "--N", 3, "--kappa", 0.3], capsys)
    assert rc == cli.EXIT_VALIDATION
    assert "validation" in out.err


def test_q_required_where_needed(capsys):
    with pytest.raises(SystemExit):
        cli.main(["admissible", "--N", "3", "--kappa", "0.25"])


def test_barrier_constraint_is_validation_failure(capsys):
    rc, _ = run(["barrier", "eval", "--N", 3, "--kappa", "3/16", "--q", 2, "--gamma", 0.9], capsys)
    assert rc == cli.EXIT_VALIDATION


def test_supercritical_dirac_refused(capsys):
    rc, _ = run(["bvp", "dirac", "--N", 2, "--kappa", 0.25, "--q", 6], capsys)
    assert rc == cli.EXIT_VALIDATION


def test_out_directory_layout(tmp_path, capsys):
    rc, _ = run(["--out", tmp_path, "linear1d", "eigen", "--N", 3, "--kappa", 0.125], capsys)
    assert rc == cli.EXIT_OK
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "meta" / "metadata.json").exists()
    assert "timestamp" not in (tmp_path / "report.json").read_text()


@pytest.mark.parametrize("text", ["N=3\n", "command=exponents\nkappa=0.25\n", "command=exponents\nN=3\nkappa=a:b:c\n"])
def test_manifest_parse_forms(text):
    try:
        m = cli.parse_manifest_text(text)
    except cli.ManifestError:
        return
    assert m.points() == []


def test_manifest_ranges_and_lists():
    m = cli.parse_manifest_text("command=exponents\nN=2\nN=3\nkappa=1/16\nq=1.5:2.5:3  # comment\n")
    pts = m.points()
    assert len(pts) == 6
    assert {pt["q"] for pt in pts} == {1.5, 2.0, 2.5}
    assert {pt["kappa"] for pt in pts} == {Fraction(1, 16)}


def test_json_manifest_equivalent():
    a = cli.parse_manifest_text("command=exponents\nN=3\nkappa=0.25\nq=2\nq=3\n")
    b = cli.parse_manifest_text(json.dumps({"command": "exponents", "N": 3, "kappa": 0.25, "q": [2, 3]}))
    assert a.points() == b.points()


def test_empty_grid(tmp_path):
    (tmp_path / "m.txt").write_text("command=exponents\nkappa=0.25\n")
    out = tmp_path / "out"
    assert cli.main(["sweep", str(tmp_path / "m.txt"), "--out", str(out)]) == cli.EXIT_OK
    assert not out.exists()


def test_sweep_validation_before_run(tmp_path):
    (tmp_path / "m.txt").write_text("command=exponents\nN=3\nkappa=0.25\nkappa=0.3\n")
    out = tmp_path / "out"
    assert cli.main(["sweep", str(tmp_path / "m.txt"), "--out", str(out)]) == cli.EXIT_VALIDATION
    assert not out.exists()


PHASE = """command=exponents
N=3
kappa=1/16
kappa=1/8
kappa=3/16
kappa=1/4
q=1.1:4:30
seed=7
"""


def _sweep(tmp_path, name, jobs=1, text=PHASE):
    m = tmp_path / "phase.txt"
    m.write_text(text)
    out = tmp_path / name
    rc = cli.main(["sweep", str(m), "--out", str(out), "--jobs", str(jobs)])
    return rc, out


def test_phase_diagram_table(tmp_path):
    rc, out = _sweep(tmp_path, "a")
    assert rc == cli.EXIT_OK
    with (out / "table.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 120
    assert list(rows[0])[:5] == ["run", "status", "N", "kappa", "q"]
    for row in rows:
        p = HardyParams(int(row["N"]), float(Fraction(row["kappa"])), float(row["q"]))
        qc = float(row["exponents.q_c"])
        assert abs(qc - derive_exponents(p).q_c) <= 1e-12
        assert (row["subcritical"] == "true") == (p.q < qc)
    assert json.loads((out / "summary.json").read_text())["n_runs"] == 120


def test_sweep_deterministic_across_jobs(tmp_path):
    _, a = _sweep(tmp_path, "a", jobs=1)
    _, b = _sweep(tmp_path, "b", jobs=2)
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file() and "meta" not in p.parts)
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file() and "meta" not in p.parts)
    assert files_a == files_b
    for f in files_a:
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_partial_failure_status(tmp_path):
    text = "command=omega\nN=3\nkappa=1/4\nq=2\nn=64\nn=512\n"
    rc, out = _sweep(tmp_path, "c", text=text)
    with (out / "table.csv").open() as fh:
        status = [r["status"] for r in csv.DictReader(fh)]
    assert rc == cli.EXIT_PARTIAL
    assert "ok" in status and status.count("ok") < len(status)


def test_csv_full_precision(tmp_path):
    rc, out = _sweep(tmp_path, "d", text="command=exponents\nN=3\nkappa=1/3\nkappa=0.2\nq=2\n")
    assert rc == cli.EXIT_VALIDATION
    rc, out = _sweep(tmp_path, "e", text="command=exponents\nN=3\nkappa=0.2\nq=2\n")
    with (out / "table.csv").open() as fh:
        row = next(csv.DictReader(fh))
    ex = derive_exponents(HardyParams(3, 0.2, 2.0))
    assert float(row["exponents.alpha_plus"]) == ex.alpha_plus

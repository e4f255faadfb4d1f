import csv
import io
import json
import subprocess
import sys

import pytest

from deltawalk.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_watson_range(capsys):
    code, out, _ = run(capsys, "watson", "--d", "1..4")
    rows = json.loads(out)
    assert code == 0 and [r["d"] for r in rows] == [1, 2, 3, 4]
    assert rows[0]["c"] == "inf" and rows[1]["c1"] == "-inf"
    assert abs(rows[2]["c"] - 0.5054620197) < 1e-9


def test_watson_csv_header(capsys):
    code, out, _ = run(capsys, "watson", "--d", "1,3", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "d,c,c1,asym3,status"
    assert lines[1].startswith("1,INF,-INF,")


def test_watson_large_dimension(capsys):
    _, out, _ = run(capsys, "watson", "--d", "10")
    assert abs(json.loads(out)[0]["c"] - 0.10575) < 5e-4


@pytest.mark.parametrize("d", ["0", "x", "4..2"])
def test_watson_invalid_dimension(capsys, d):
    code, out, err = run(capsys, "watson", "--d", d)
    assert code != 0 and out == ""
    assert json.loads(err)["field"] == "d"


def test_spectrum_one_particle(capsys):
    _, out, _ = run(capsys, "spectrum", "--d", "1", "--lambda", "1", "--mu", "2")
    doc = json.loads(out)
    assert doc["essential"] == [0.0, 4.0]
    assert doc["point"]["kind"] == "Exists"
    assert doc["point"]["nu"] == pytest.approx(4.82842712474619, rel=1e-12)
    assert "regime" in doc


def test_spectrum_inert_fiber(capsys):
    _, out, _ = run(capsys, "spectrum", "--d", "1", "--lambda1", "1", "--lambda2", "1", "--mu", "2", "--phi", "1.0")
    doc = json.loads(out)
    assert doc["point"]["nu"] == 6.0 and doc["essential"] == [4.0, 4.0]


def test_spectrum_without_interaction(capsys):
    _, out, _ = run(capsys, "spectrum", "--d", "1", "--lambda", "1", "--mu", "0")
    assert json.loads(out)["point"]["kind"] == "Absent"


def test_validation_error_names_field(capsys):
    code, _, err = run(capsys, "spectrum", "--d", "2", "--lambda1", "-1", "--lambda2", "1", "--mu", "1", "--phi", "0,0")
    assert code != 0 and json.loads(err)["field"] == "lambda1"


def test_usage_error_is_json(capsys):
    code, _, err = run(capsys, "spectrum", "--bogus")
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_surface_rows(capsys):
    _, out, _ = run(
        capsys, "surface", "--d", "1", "--lambda1", "1", "--lambda2", "1", "--mu", "2", "--grid", "64", "--format", "csv"
    )
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 64
    nus = {float(r["phi1"]): float(r["nu"]) for r in rows}
    assert abs(nus[0.0] - 8.4721) < 1e-4 and nus[1.0] == 6.0
    assert [float(r["phi1"]) for r in rows] == sorted(nus)


def test_surface_empty_grid(capsys):
    code, out, _ = run(capsys, "surface", "--d", "1", "--lambda1", "1", "--lambda2", "1", "--mu", "2", "--grid", "0")
    assert code == 0 and json.loads(out) == []


def test_surface_deterministic_across_threads(capsys):
    args = ["surface", "--d", "2", "--lambda1", "1", "--lambda2", "2", "--mu", "-3", "--grid", "3,4"]
    _, a, _ = run(capsys, *args, "--threads", "1")
    _, b, _ = run(capsys, *args, "--threads", "0")
    assert a == b


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "watson", "--d", "1..3")
    assert json.dumps(json.loads(out), indent=2) + "\n" == out


def test_wavefunction_delta_case(capsys):
    _, out, _ = run(
        capsys, "wavefunction", "--d", "1", "--lambda1", "1", "--lambda2", "1", "--mu", "2",
        "--phi", "1", "--radius", "3", "--format", "csv",
    )
    comments = [l for l in out.splitlines() if l.startswith("#")]
    assert "# K0=1.0" in comments
    rows = [r for r in csv.reader(l for l in out.splitlines() if not l.startswith("#"))]
    data = [r for r in rows[1:] if r[0] != "decay_fit"]
    nonzero = [r for r in data if float(r[1]) != 0.0 or float(r[2]) != 0.0]
    assert nonzero == [["0", "1.0", "0.0"]]


def test_wavefunction_decay_summary(capsys):
    _, out, _ = run(
        capsys, "wavefunction", "--d", "1", "--lambda1", "1", "--lambda2", "2", "--mu", "3",
        "--phi", "0.5", "--radius", "6", "--format", "csv",
    )
    last = out.splitlines()[-1].split(",")
    assert last[0] == "decay_fit" and 0 < float(last[4]) < 1


def test_wavefunction_radius_zero_is_usage_error(capsys):
    code, _, err = run(capsys, "wavefunction", "--d", "1", "--lambda", "1", "--mu", "2", "--radius", "0")
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_wavefunction_absent_exits_nonzero(capsys):
    code, out, err = run(capsys, "wavefunction", "--d", "3", "--lambda", "1", "--mu", "0.5", "--radius", "2")
    assert code != 0 and json.loads(err)["error"] == "no_eigenfunction"


def test_g0(capsys):
    _, out, _ = run(capsys, "g0", "--d", "1", "--lambda1", "1", "--lambda2", "2", "--mu", "3", "--radius", "1,2")
    doc = json.loads(out)
    vals = {tuple(v[:2]): v[2] for v in doc["values"]}
    assert len(vals) == 15 and vals[(0, 0)] == pytest.approx(2.5066282746310002, rel=1e-10)
    assert doc["status"] == "Converged"


def test_verify_oracle(capsys):
    code, out, _ = run(capsys, "verify", "oracle")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert any("Lanczos" in c["name"] for c in doc["checks"])


def test_verify_appendix_csv(capsys):
    code, out, _ = run(capsys, "verify", "appendix", "--format", "csv")
    assert code == 0 and "b_probe m=5 y=5,0.0,0.0,PASS,Converged" in out


def test_config_file_defaults_and_override(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("lambda = 1\nmu = 2\nd = 1\n")
    monkeypatch.setenv("DELTAWALK_CONFIG", str(cfg))
    _, out, _ = run(capsys, "spectrum")
    assert json.loads(out)["point"]["nu"] == pytest.approx(4.82842712474619)
    _, out, _ = run(capsys, "spectrum", "--mu", "0")
    assert json.loads(out)["point"]["kind"] == "Absent"


def test_out_file(capsys, tmp_path):
    path = tmp_path / "w.csv"
    assert main(["watson", "--d", "3", "--format", "csv", "--out", str(path)]) == 0
    assert path.read_text().startswith("d,c,c1,asym3,status\n")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "deltawalk", "spectrum", "--d", "1", "--lambda", "1", "--mu", "2", "--format", "csv"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.splitlines()[0] == "beta1,beta2,kind,nu,regime"

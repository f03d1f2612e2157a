import json

import numpy as np
import pytest

from betaspec.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sample_twice_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["sample", "--ensemble", "hermite", "--beta", "2", "--n", "100", "--seed", "7", "--out"]
    assert main(argv + [str(a)]) == 0 and main(argv + [str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert list(doc)[0] == "manifest"
    assert doc["n"] == 100 and len(doc["diag"]) == 100 and len(doc["offdiag"]) == 99


def test_density_grid(capsys):
    code, out, _ = run(["density", "--law", "semicircle", "--beta", "1", "--grid", "-2:2:401"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x,density" and len(lines) == 402
    row = dict(tuple(map(float, ln.split(","))) for ln in lines[1:])
    assert abs(row[0.0] - 0.3183099) <= 1e-6


def test_converge_rows(capsys):
    code, out, _ = run(["converge", "--ensemble", "laguerre", "--beta", "1", "--gamma", "2",
                        "--sizes", "250,500,1000", "--trials", "10", "--seed", "3"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,trials,ks_mean,ks_std" and len(lines) == 4
    ks = [float(ln.split(",")[2]) for ln in lines[1:]]
    assert ks[0] > ks[1] > ks[2]


def test_rootmeasure_and_eigen_from_input(tmp_path, capsys):
    m = tmp_path / "m.json"
    main(["sample", "--ensemble", "laguerre", "--beta", "1", "--gamma", "2", "--n", "2", "--seed", "1",
          "--out", str(m)])
    code, out, _ = run(["rootmeasure", "--input", str(m), "--root", "0"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "location,mass" and len(lines) == 3
    assert sum(float(ln.split(",")[1]) for ln in lines[1:]) == pytest.approx(1.0)
    code, out, _ = run(["eigen", "--input", str(m)], capsys)
    assert out.splitlines()[0] == "index,eigenvalue" and len(out.splitlines()) == 3


def test_eigen_histogram(capsys):
    code, out, _ = run(["eigen", "--ensemble", "hermite", "--beta", "1", "--n", "500", "--seed", "2",
                        "--histogram", "-2.5:2.5:10"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "bin_left,bin_right,count,density" and len(lines) == 11
    assert sum(int(ln.split(",")[2]) for ln in lines[1:]) == 500


def test_seventeen_digits_and_lf(tmp_path, capsys):
    out = tmp_path / "e.csv"
    main(["eigen", "--ensemble", "hermite", "--beta", "1", "--n", "20", "--seed", "2", "--out", str(out)])
    raw = out.read_bytes()
    assert b"\r" not in raw
    vals = [ln.split(",")[1] for ln in raw.decode().splitlines()[1:]]
    from betaspec.ensembles import sample_hermite
    from betaspec.sampling import RngStream
    from betaspec.spectral import eigenvalues
    exact = eigenvalues(sample_hermite(20, 1.0, RngStream(2)))
    assert np.array_equal(np.array(vals, dtype=float), exact)


def test_seed_required(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--ensemble", "hermite", "--beta", "1", "--n", "3"])
    assert exc.value.code == 2


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["density", "--law", "semicircle", "--beta", "1", "--grid", "0:1:3", "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_parameter_error_is_usage_error(capsys):
    code, _, err = run(["sample", "--ensemble", "laguerre", "--beta", "1", "--gamma", "0.5", "--n", "5",
                        "--seed", "1"], capsys)
    assert code == 2 and "gamma" in err


def test_runtime_errors_exit_one(tmp_path, capsys):
    code, _, _ = run(["eigen", "--input", str(tmp_path / "missing.json")], capsys)
    assert code == 1
    code, _, _ = run(["density", "--law", "semicircle", "--beta", "1", "--grid", "0:1:3",
                      "--out", str(tmp_path / "no" / "such" / "dir.csv")], capsys)
    assert code == 1


def test_crosscheck_and_moments(capsys):
    code, out, _ = run(["crosscheck", "--ensemble", "hermite", "--beta", "2"], capsys)
    rows = out.splitlines()[1:]
    assert code == 0 and len(rows) == 100
    assert max(float(r.split(",")[3]) for r in rows) <= 1e-8
    code, out, _ = run(["moments", "--ensemble", "hermite", "--beta", "1", "--kmax", "6"], capsys)
    vals = [float(r.split(",")[1]) for r in out.splitlines()[1:]]
    assert vals[2] == pytest.approx(1) and vals[4] == pytest.approx(2) and vals[6] == pytest.approx(5)


def test_stdout_csv_manifest_on_stderr(capsys):
    code, out, err = run(["density", "--law", "marchenko-pastur", "--beta", "1", "--gamma", "4",
                          "--grid", "1:9:5"], capsys)
    man = json.loads(err)["manifest"]
    assert man["command"] == "density" and man["seed"] is None and man["timestamp"] is None


def test_stamp_recorded_and_replayed(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["sample", "--ensemble", "hermite", "--beta", "1", "--n", "4", "--seed", "1", "--stamp",
          "--out", str(a)])
    assert json.loads(a.read_text())["manifest"]["timestamp"] is not None
    assert main(["replay", str(a), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()

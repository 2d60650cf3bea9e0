import json

import numpy as np

from eqdist.cli import main


def test_roots_smoke(capsys):
    assert main(["roots", "--ensemble", "kac", "--n", "4", "--dist", "rademacher", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "re,im" and len(lines) == 5


def test_tail_check_boundary(capsys):
    assert main(["tail-check", "--dist", "logpareto:1", "--samples", "1000"]) == 0
    assert "meas_holds=false" in capsys.readouterr().out


def test_run_missing_config_is_io_error(tmp_path):
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_unknown_flag_is_usage_error(capsys):
    assert main(["roots", "--frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err


def test_bad_config_is_config_error(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"ensemble": "kac", "dist": "gaussian", "degrees": [8, 4], "trials": 1}))
    assert main(["run", str(path)]) == 1
    assert "$.degrees" in capsys.readouterr().err
    path.write_text("{not json")
    assert main(["run", str(path)]) == 1


def test_run_writes_outputs_independent_of_threads(tmp_path, monkeypatch):
    cfg = {"ensemble": "kac", "dist": "gaussian", "degrees": [16], "trials": 3,
           "statistics": ["radial_ks"], "seed": 1, "output_dir": str(tmp_path / "x")}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", str(path), "--threads", "1", "--output-dir", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("EQDIST_THREADS", "3")
    assert main(["run", str(path), "--output-dir", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "summary.json").read_bytes()
    assert a == (tmp_path / "b" / "summary.json").read_bytes()
    assert (tmp_path / "a" / "roots" / "n16_t2.csv").exists()


def test_cover_check(capsys):
    assert main(["cover-check", "--array", "kac", "--n", "128", "--z", "0.5403023058681398,0.8414709848078965",
                 "--eps", "0.1"]) == 0
    assert "covering_number=129" in capsys.readouterr().out


def test_potential_grid(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["potential-grid", "--ensemble", "kac", "--n", "64", "--out", str(out)]) == 0
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert data.shape == (64 * 64, 4)
    assert np.mean(np.abs(data[:, 2] - data[:, 3])) < 0.1


def test_roots_unwritable_output_is_io_error(tmp_path):
    assert main(["roots", "--ensemble", "kac", "--n", "3", "--out", str(tmp_path / "no" / "x.csv")]) == 2


def test_kac2_roots_rejected():
    assert main(["roots", "--ensemble", "kac2", "--n", "3"]) == 1

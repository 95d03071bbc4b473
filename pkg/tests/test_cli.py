import csv
import json

import numpy as np
import pytest

from graphmaslov.cli import main


def write_config(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture
def interval_cfg():
    return {
        "graph": {"builder": "interval", "length": float(np.pi)},
        "boundary": {"builder": "dirichlet"},
        "window": [0.5, 10.0],
    }


def test_spectrum_csv_golden(tmp_path, interval_cfg):
    cfg = write_config(tmp_path / "c.json", interval_cfg)
    out = tmp_path / "out"
    assert main(["spectrum", "--config", cfg, "--out", str(out), "--format", "both"]) == 0
    with open(out / "series.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["lambda", "multiplicity", "residual"]
    lams = [float(r[0]) for r in rows[1:]]
    mults = [int(r[1]) for r in rows[1:]]
    assert lams == pytest.approx([1.0, 4.0, 9.0], abs=1e-8)
    assert mults == [1, 1, 1]
    assert all(float(r[2]) < 1e-8 for r in rows[1:])


def test_box_robin_report(tmp_path):
    cfg = write_config(tmp_path / "c.json", {
        "graph": {"builder": "interval", "length": float(np.pi)},
        "family": {"builder": "robin"},
        "range": [-1.0, 0.0],
    })
    out = tmp_path / "out"
    assert main(["box", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == "box"
    assert report["pass"] is True
    assert report["result"]["spectral_flow"] == 1
    assert report["result"]["maslov_index"] == 1
    assert sum(report["result"]["sides"]) == 0
    assert set(report) == {"config", "command", "result", "pass", "crossings", "certificates"}


def test_check_rank_deficient_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", {
        "graph": {"builder": "interval", "length": 1.0},
        "boundary": {
            "a": [[[1, 0], [0, 0]], [[1, 0], [0, 0]]],
            "b": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
        },
    })
    assert main(["check", "--config", cfg]) == 2
    assert "rank" in capsys.readouterr().err


def test_check_valid_pair(tmp_path):
    cfg = write_config(tmp_path / "c.json", {
        "graph": {"builder": "interval", "length": 1.0},
        "boundary": {"builder": "dirichlet"},
    })
    assert main(["check", "--config", cfg]) == 0


def test_missing_key_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", {"graph": {"builder": "interval", "length": 1.0}})
    assert main(["spectrum", "--config", cfg]) == 2
    assert "missing required key" in capsys.readouterr().err


def test_bad_tolerance_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", {
        "graph": {"builder": "interval", "length": 1.0},
        "boundary": {"builder": "dirichlet"},
        "window": [0.5, 2.0],
    })
    assert main(["spectrum", "--config", cfg, "--tol-eig", "0.5"]) == 2
    assert "tol_eig" in capsys.readouterr().err


def test_reports_byte_reproducible(tmp_path, interval_cfg):
    cfg = write_config(tmp_path / "c.json", interval_cfg)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["spectrum", "--config", cfg, "--out", str(out1)])
    main(["spectrum", "--config", cfg, "--out", str(out2)])
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()


def test_flow_command(tmp_path):
    cfg = write_config(tmp_path / "c.json", {
        "graph": {"builder": "interval", "length": float(np.pi)},
        "family": {"builder": "robin"},
        "range": [-1.0, 0.0],
    })
    out = tmp_path / "out"
    assert main(["flow", "--config", cfg, "--out", str(out), "--format", "both"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["result"]["flow"] == 1
    assert report["result"]["tracking_flow"] == 1


def test_maslov_command(tmp_path):
    cfg = write_config(tmp_path / "c.json", {
        "graph": {"builder": "interval", "length": float(np.pi), "potential": -5.0},
        "boundary": {"builder": "dirichlet"},
        "window": [-7.0, -0.1],
    })
    out = tmp_path / "out"
    assert main(["maslov", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["result"]["index"] == -2
    assert len(report["crossings"]) == 2

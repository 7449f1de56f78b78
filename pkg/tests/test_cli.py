import csv
import json
import subprocess
import sys

import pytest

from ncsim.cli import SWEEP_COLUMNS, main


def test_check_bundled_and_file(tmp_path, capsys):
    assert main(["check", "ideal_can"]) == 0
    p = tmp_path / "x.cfg"
    p.write_text("network.kind = switched-ethernet\n")
    assert main(["check", "--scenario", str(p)]) == 0
    assert "ok" in capsys.readouterr().out


def test_check_reports_offending_key(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("network.kind = can\npriority.controller = 1\npriority.process = 2\npriority.overload = 3\nloss.probability = 1.5\n")
    assert main(["check", str(p)]) == 2
    assert "loss.probability" in capsys.readouterr().err


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--scenario", "loss_can", "--seed", "2", "--duration", "0.5", "--out", str(out)]) == 0
    js = json.loads((out / "summary.json").read_text())
    assert js["seed"] == 2
    assert (out / "trace.csv").read_text().startswith("time_s,reference,output,control\n")
    assert "wrote" in capsys.readouterr().out


def test_run_into_a_file_fails_cleanly(tmp_path, capsys):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(["run", "--scenario", "ideal_can", "--duration", "0.05", "--out", str(blocker)]) == 1
    assert str(blocker) in capsys.readouterr().err


def test_sweep_one_row_per_value_and_seed(tmp_path):
    out = tmp_path / "sw"
    rc = main(["sweep", "--scenario", "loss_ethernet", "--param", "loss.probability", "--values", "0,0.3", "--seeds", "3", "--duration", "0.3", "--out", str(out)])
    assert rc == 0
    with open(out / "sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == SWEEP_COLUMNS
    assert [(r[1], r[2]) for r in rows[1:]] == [(v, str(s)) for v in ("0", "0.3") for s in range(3)]
    dropped = [int(r[SWEEP_COLUMNS.index("dropped_frames")]) for r in rows[1:]]
    assert dropped[:3] == [0, 0, 0] and min(dropped[3:]) > 0


def test_sweep_bad_key(tmp_path, capsys):
    rc = main(["sweep", "--scenario", "ideal_can", "--param", "loss.nope", "--values", "1", "--seeds", "1", "--out", str(tmp_path)])
    assert rc == 2
    assert "loss.nope" in capsys.readouterr().err


def test_sweep_rejects_zero_seeds(tmp_path):
    with pytest.raises(SystemExit):
        main(["sweep", "--scenario", "ideal_can", "--param", "loss.probability", "--values", "0", "--seeds", "0", "--out", str(tmp_path)])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ncsim", "check", "can_config_b"], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "can" in r.stdout

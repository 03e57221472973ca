import json
import math
import subprocess
import sys

import pytest

from dumbbell.cli import main


def test_vertical_drop(capsys):
    code = main(["--mode", "simulate", "--y", "2", "--phi", str(1.5 * math.pi),
                 "--y-dot", "-1", "--phi-dot", "0"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    header, row = out[0].split(","), out[1].split(",")
    assert row[header.index("collision_count")] == "1"
    assert row[header.index("termination")] == "Escaped"


def test_bound_check_files(tmp_path):
    out = tmp_path / "bound.csv"
    code = main(["--mode", "bound-check", "--ratios", "1,2", "--trials", "50", "--seed", "5",
                 "--out", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 3
    assert (tmp_path / "bound.csv.summary.csv").exists()
    meta = json.loads((tmp_path / "bound.csv.meta.json").read_text())
    assert meta["config"]["ratios"] == [1.0, 2.0]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "wedge-oracle", "trials": 10, "seed": 1}))
    assert main(["--config", str(cfg), "--trials", "20", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["summary"][0]["trials"] == 20


@pytest.mark.parametrize("argv", [
    ["--mode", "bound-check", "--trials", "0"],
    ["--mode", "bound-check", "--m1", "-2"],
    ["--mode", "simulate", "--y", "1"],
    ["--mode", "simulate", "--y", "0", "--phi", str(1.5 * math.pi), "--y-dot", "-1", "--phi-dot", "0"],
    ["--config", "/nonexistent/config.json"],
])
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_bad_json(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text("{mode: ")
    assert main(["--config", str(cfg)]) == 2
    assert "config" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dumbbell", "--mode", "wedge-oracle", "--trials", "5"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("trials,mismatches,over_bound")

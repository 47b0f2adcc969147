import json
import subprocess
import sys

import pytest

from smoothpell.cli import main


def test_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["run", "--case", "x2+1", "--bound", "10", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("case,d,N,k,x,y")
    assert [l.split(",")[4] for l in lines[1:]] == ["1", "2", "3", "7"]


def test_bound_below_three_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--case", "x2+1", "--bound", "2"])
    assert info.value.code == 2


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as info:
        main(["run", "--case", "x2+1", "--bound", "10", "--nope"])
    assert info.value.code == 2


def test_verify_largest_x2_minus_4(capsys):
    assert main(["verify", "--case", "x2-4", "--x", "407479035814853", "--bound", "100", "--pipeline"]) == 0
    text = capsys.readouterr().out
    assert "97^2" in text and "found by pipeline" in text


def test_verify_failure_exit_code(capsys):
    assert main(["verify", "--case", "x2+1", "--x", "10", "--bound", "100"]) == 1


def test_report_and_oracle(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["run", "--case", "x2-2", "--bound", "30", "--format", "json", "--out", str(out)])
    assert main(["report", str(out)]) == 0
    assert "solutions" in capsys.readouterr().out
    assert main(["oracle", "--case", "x2-2", "--bound", "30", "--x-limit", "100000", "--results", str(out)]) == 0
    assert "mismatches: 0" in capsys.readouterr().out
    assert main(["report", str(out), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["case"] == "x2-2"


def test_dump_compact(capsys):
    assert main(["dump-compact", "94"]) == 0
    head = capsys.readouterr().out.splitlines()[0]
    assert head.split()[0] == "94"


def test_checkpoint_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SMOOTHPELL_CHECKPOINT_DIR", str(tmp_path))
    assert main(["run", "--case", "x2+1", "--bound", "10", "--format", "text"]) == 0
    assert (tmp_path / "x2+1-B10.ckpt.json").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "smoothpell", "run", "--case", "x2+1", "--bound", "10", "--format", "text"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "4 solutions" in proc.stdout

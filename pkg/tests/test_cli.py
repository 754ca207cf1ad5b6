from __future__ import annotations

import subprocess
import sys

import pytest

from chromsplit.cli import main


def test_adss_table(capsys):
    assert main(["adss", "--coefficients", "z2", "--depth", "8"]) == 0
    out = capsys.readouterr().out
    assert "H^4 = Z/2 + Z/8" in out


def test_sseq_run_ledger(capsys):
    assert main(["sseq", "run", "lk1lk2-v0"]) == 0
    out = capsys.readouterr().out
    assert "v1*chi: differential, d3 = eta^2*chi^2" in out


def test_sseq_json_ledger(capsys):
    import json

    assert main(["sseq", "run", "lk1-v0", "--json"]) == 0
    entries = json.loads(capsys.readouterr().out)
    assert {e["event"] for e in entries} <= {"differential", "survives", "extension"}
    assert set(entries[0]) == {"page", "cell", "class", "event", "justification"}


def test_mismatch_exit_code(tmp_path, capsys):
    import json
    from importlib import resources

    d = json.loads(resources.files("chromsplit").joinpath("scenarios", "lk1-y.json").read_text())
    d["expected"]["rank"] = 3
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    assert main(["sseq", "run", str(path)]) == 1


@pytest.mark.parametrize("argv", [[], ["bogus"], ["adss", "--coefficients", "q"], ["sseq", "run", "nope"],
                                  ["verify", "99"], ["chart", "fig2", "--format", "svg"],
                                  ["height1", "--t", "x"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_height1_negative_range(capsys):
    assert main(["height1", "--t", "-4:0", "--smax", "1"]) == 0
    out = capsys.readouterr().out
    assert "1\t-4\tZ2\tZ/8\talpha_-2/3" in out


@pytest.mark.parametrize("argv", [["tdss"], ["quaternion", "verify"], ["les", "moore"], ["les", "twist"],
                                  ["les", "fiber"], ["les", "splitting"], ["chart", "fig5"],
                                  ["chart", "fig3", "--format", "svg", "--panel", "2"], ["chart", "lk1-y"]])
def test_commands_succeed(argv, capsys):
    assert main(argv) == 0
    assert capsys.readouterr().out


def test_verify_single_criterion(capsys):
    assert main(["verify", "12"]) == 0
    assert capsys.readouterr().out.startswith("PASS 12")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chromsplit", "verify", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("PASS")

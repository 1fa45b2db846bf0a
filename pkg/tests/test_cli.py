import json
import subprocess
import sys

import pytest

from sl2cactus.cli import main
from sl2cactus.verify import EXIT_DISAGREE, EXIT_OK, EXIT_UNCERTIFIED, EXIT_USAGE, ExperimentConfig, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_etingof_example_agrees(capsys):
    code, out = run(capsys, "verify", "etingof", "--weights", "1,1,1", "--word", "[[1,3]]", "--mode", "all")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["summary"]["agreement"] and data["summary"]["certified"]
    inst = data["instances"]
    assert inst and all(i["agreement"] for i in inst)
    assert all(set(i["maps"]) == {"crystal", "hives", "spectral-numeric"} for i in inst)


def test_closed_form_commutor_is_flagged(capsys):
    code, out = run(capsys, "verify", "etingof", "--weights", "1,1,1", "--word", "[[1,3]]", "--commutor", "closed-form")
    assert code == EXIT_DISAGREE
    data = json.loads(out)
    assert any(i["diff"] for i in data["instances"])


def test_relations_sweep(capsys):
    code, out = run(capsys, "verify", "relations", "--weights", "2,1,2", "--mode", "hives")
    assert code == EXIT_OK
    assert json.loads(out)["summary"]["agreement"]


def test_uncertified_exit(capsys):
    code, _ = run(capsys, "verify", "etingof", "--weights", "2,2,2", "--word", "[[2,3]]", "--tol", "1")
    assert code == EXIT_UNCERTIFIED


def test_usage_errors(capsys):
    assert main(["verify", "etingof", "--weights", "1,1,5", "--word", "[[1,3]]"]) == EXIT_USAGE
    assert main(["verify", "etingof"]) == EXIT_USAGE
    assert main(["nonsense"]) == EXIT_USAGE
    assert main(["crystal", "act", "--weights", "1,1", "--coords", "0,2"]) == EXIT_USAGE
    assert main(["gaudin", "spectrum", "--weights", "1,1", "--z", "0,0"]) == EXIT_USAGE
    with pytest.raises(UsageError):
        ExperimentConfig(weights=(1, 1, 1, 1, 1))
    capsys.readouterr()


def test_report_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["verify", "etingof", "--weights", "1,2,1", "--word", "[[1,3],[1,2]]", "--mode", "all"]
    assert main(argv + ["--out", str(a)]) == EXIT_OK
    assert main(argv + ["--out", str(b), "--jobs", "2"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert "seconds" not in a.read_text()


def test_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"weights": [1, 1, 1], "word": [[1, 3]], "mode": "hives", "nu": 3}))
    code, out = run(capsys, "verify", "etingof", "--config", str(cfg), "--nu", "1")
    assert code == EXIT_OK
    data = json.loads(out)
    assert {i["nu"] for i in data["instances"]} == {1}


def test_curves_file(tmp_path, capsys):
    curves = tmp_path / "c.csv"
    code, _ = run(capsys, "transport", "edge", "--weights", "2,2,2", "--nu", "2", "--curves", str(curves))
    assert code == EXIT_OK
    text = curves.read_text()
    assert text.startswith("t,lambda_1,lambda_2,lambda_3")


def test_subcommands_run(capsys):
    cases = [
        ["crystal", "highest", "--weights", "1,1,1"],
        ["crystal", "act", "--weights", "1,1,1", "--coords", "0,0,1", "--word", "[[1,3]]"],
        ["hives", "labels", "--weights", "2,2,2", "--tree", "[1,[2,3]]"],
        ["hives", "act", "--weights", "2,2,2", "--word", "[[2,3]]"],
        ["gaudin", "eigenbasis", "--weights", "1,1,1", "--nu", "1"],
        ["gaudin", "spectrum", "--weights", "1,1,1", "--z", "0,1,1/3"],
        ["gaudin", "simplicity", "--weights", "2,2,2", "--z", "0,1,5"],
        ["transport", "loop", "--weights", "2,2,2", "--nu", "2", "--loop", "rp1"],
        ["transport", "loop", "--weights", "1,1,1,1", "--nu", "0", "--word", "[[1,4],[2,3]]"],
    ]
    for argv in cases:
        code, out = run(capsys, *argv)
        assert code == EXIT_OK, argv
        data = json.loads(out)
        assert data["schema"] == 1 and "producer" in data


def test_crystal_act_result(capsys):
    _, out = run(capsys, "crystal", "act", "--weights", "1,1,1", "--coords", "0,0,1", "--word", "[[1,3]]")
    assert json.loads(out)["result"]["coords"] == [0, 1, 0]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sl2cactus", "verify", "etingof", "--weights", "1,1", "--word", "[[1,2]]"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["summary"]["agreement"]

import subprocess
import sys

import pytest

from aircomp.cli import main
from aircomp.experiment import read_csv


def test_type_demo(capsys):
    assert main(["type-demo", "--k", "200", "--l", "16", "--attackers", "60", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["bin", "count", "clean", "corrupted", "corrected"]
    assert len(lines) == 17
    last = lines[-1].split()
    assert float(last[3]) - float(last[2]) == pytest.approx(0.3, abs=1e-4)
    assert float(last[4]) == 0.0


def test_sweep_with_config(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("K: 100\nL: 16\ntrials: 3\nsnr_db_list: [20]\nattacker_ratio_list: [0, 0.2]\n"
                   "methods: [da, tbma-robust]\nfns: arithmetic_mean\n")
    out = tmp_path / "o.csv"
    assert main(["nmse-sweep", "--config", str(cfg), "--out", str(out), "--seed", "9"]) == 0
    meta, recs = read_csv(out)
    assert meta["master_seed"] == "9" and len(recs) == 4


def test_sweep_stdout(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("K: 50\nL: 8\ntrials: 2\nsnr_db_list: [10]\nattacker_ratio_list: [0.1]\n"
                   "methods: [tbma-median]\nfns: [arithmetic_mean]\n")
    assert main(["nmse-sweep", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("method,fn") and out[1].startswith("tbma-median,arithmetic_mean,10.0,0.1,2,")


def test_fl_demo(tmp_path):
    out = tmp_path / "fl.csv"
    assert main(["fl-demo", "--rounds", "2", "--bins", "1024", "--range", "2", "--method", "da,tbma-plain",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == "round,method,accuracy" and len(body) == 5


@pytest.mark.parametrize("argv", [
    ["nmse-sweep", "--config", "/nonexistent.yaml"],
    ["fl-demo", "--method", "magic"],
    ["fl-demo", "--attackers", "60"],
    ["type-demo", "--l", "1"],
    ["no-such-command"],
])
def test_config_errors_exit_1(argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 1


def test_runtime_error_exit_2(tmp_path):
    assert main(["nmse-sweep", "--trials", "1", "--out", str(tmp_path / "no" / "x.csv")]) == 2


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "aircomp", "type-demo", "--k", "20", "--l", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and len(res.stdout.splitlines()) == 5

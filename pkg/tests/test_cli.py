import csv
import hashlib
import json

import pytest

from epsim import cli
from epsim.config import format_config, parse_config

SMOKE = """\
name = smoke
dim = 2
points = 16
alpha = 0.5
t_end = 0.05
dt = 0.01
[initial_data]
kind = odd_random
"""


@pytest.fixture
def smoke_cfg(tmp_path):
    p = tmp_path / "smoke.cfg"
    p.write_text(SMOKE)
    return p


def test_run_writes_outputs(tmp_path, smoke_cfg, monkeypatch):
    monkeypatch.delenv("EPSIM_OUT", raising=False)
    code = cli.main(["run", "--config", str(smoke_cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_PASS
    out = tmp_path / "o" / "smoke"
    manifest = json.loads((out / "manifest.json").read_text())
    expected_hash = hashlib.sha256(format_config(parse_config(SMOKE)).encode()).hexdigest()
    assert manifest["config_hash"] == expected_hash
    assert manifest["termination"]["reason"] == "completed"
    for key in ("started", "finished", "version", "outputs"):
        assert key in manifest
    with open(out / "diagnostics.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == cli.DIAG_COLUMNS
    assert len(rows) == 1 + 6
    assert float(rows[-1][0]) == pytest.approx(0.05)


def test_env_overrides_out(tmp_path, smoke_cfg, monkeypatch):
    monkeypatch.setenv("EPSIM_OUT", str(tmp_path / "env"))
    assert cli.main(["run", "--config", str(smoke_cfg), "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "env" / "smoke" / "manifest.json").exists()
    assert not (tmp_path / "flag").exists()


def test_seed_override_changes_hash(tmp_path, smoke_cfg, monkeypatch):
    monkeypatch.delenv("EPSIM_OUT", raising=False)
    hashes = []
    for seed in ("1", "2"):
        cli.main(["run", "--config", str(smoke_cfg), "--out", str(tmp_path / seed), "--seed", seed])
        hashes.append(json.loads((tmp_path / seed / "smoke" / "manifest.json").read_text())["config_hash"])
    assert hashes[0] != hashes[1]


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(SMOKE + "alpha = -1\n")
    assert cli.main(["run", "--config", str(bad)]) == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "alpha" in err
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_CONFIG
    # well-formed config that does not fit the experiment
    assert cli.main(["wave", "--config", str(tmp_path / "bad.cfg")]) == cli.EXIT_CONFIG


def test_wrong_experiment_for_config(tmp_path, smoke_cfg):
    assert cli.main(["wave", "--config", str(smoke_cfg), "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["explode"])
    assert exc.value.code == 2


def test_failed_checks_exit_1(tmp_path, monkeypatch):
    monkeypatch.delenv("EPSIM_OUT", raising=False)
    p = tmp_path / "c.cfg"
    # an impossible tolerance forces a failed verdict
    p.write_text(SMOKE + "[checks]\nenergy_tol = 1e-300\n")
    code = cli.main(["conserve", "--config", str(p), "--out", str(tmp_path)])
    assert code == cli.EXIT_FAIL


def test_sweep_summary(tmp_path, monkeypatch):
    monkeypatch.delenv("EPSIM_OUT", raising=False)
    p = tmp_path / "s.cfg"
    p.write_text(
        "name = s\ndim = 2\npoints = 32\nalpha = [0.1, 0.03, 0.01]\nt_end = 0.1\ndt = 0.01\n"
        "[initial_data]\nkind = gradient_cosine\n[checks]\nslope_min = 0.5\nslope_max = 1.5\n"
    )
    assert cli.main(["sweep-alpha", "--config", str(p), "--out", str(tmp_path), "--threads", "2"]) == 0
    with open(tmp_path / "s" / "sweep_summary.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == cli.SWEEP_COLUMNS
    assert [float(r[0]) for r in rows[1:]] == [0.1, 0.03, 0.01]


def test_check_subcommand(capsys):
    assert cli.main(["check"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4

import json
import subprocess
import sys

import pytest

from qsarbench.cli import main
from qsarbench.harness.run import sha256_file
from qsarbench.harness.synthetic import write_toy_benchmark


@pytest.fixture(scope="module")
def config_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    write_toy_benchmark(d, n=120, seed=9)
    cfg = {
        "nbits": 512,
        "tasks": [{"name": "ames", "file": "toy_ames.csv", "kind": "classification", "group": "ADMET classification"}],
        "models": [{"id": "RF", "family": "ML", "learner": "rf", "features": "ecfp4", "params": {"n_estimators": 5}}],
    }
    p = d / "config.json"
    p.write_text(json.dumps(cfg))
    return p


def _stderr_json(capsys):
    err = capsys.readouterr().err.strip().splitlines()[-1]
    return json.loads(err)


def test_split_seed_twice_same_digest(config_file, tmp_path, capsys):
    digests = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["split", "--config", str(config_file), "--seed", "7", "--out", str(out)]) == 0
        assert json.loads(capsys.readouterr().out)["stages"][0]["stage"] == "split"
        digests.append(sha256_file(out / "folds" / "ames.folds.csv"))
    assert digests[0] == digests[1]


def test_seed_changes_config_hash(config_file, tmp_path, capsys):
    main(["split", "--config", str(config_file), "--seed", "1", "--out", str(tmp_path / "s1")])
    h1 = json.loads(capsys.readouterr().out)["config_hash"]
    main(["split", "--config", str(config_file), "--seed", "2", "--out", str(tmp_path / "s2")])
    h2 = json.loads(capsys.readouterr().out)["config_hash"]
    assert h1 != h2


def test_report_fixture_reproduces_winner_table(tmp_path, capsys):
    assert main(["report", "--fixtures", "paper_tables.csv", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "Tox21 classification,PR-AUC,12,9,2,0,1,ML" in out
    assert "ADMET classification,ROC-AUC,5,1,3,1,0,GNN" in out
    assert "Anti-infective classification,PR-AUC,2,1,1,0,0,ML/GNN" in out
    assert (tmp_path / "winners.csv").exists()


def test_report_markdown(tmp_path, capsys):
    assert main(["report", "--fixtures", "builtin:paper", "--format", "markdown", "--out", str(tmp_path)]) == 0
    assert "| Tox21 classification | PR-AUC | 12 | 9 | 2 | 0 | 1 | ML |" in capsys.readouterr().out
    assert (tmp_path / "matrix_regression.md").exists()


def test_usage_error_exit_2(capsys):
    assert main(["train"]) == 2
    assert _stderr_json(capsys)["exit_code"] == 2


def test_bad_config_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["split", "--config", str(p)]) == 2
    assert _stderr_json(capsys)["error"] == "ConfigError"


def test_missing_data_exit_3(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text(
        json.dumps(
            {
                "tasks": [{"name": "t", "file": "absent.csv", "kind": "classification"}],
                "models": [{"id": "RF", "family": "ML", "learner": "rf", "features": "ecfp4"}],
            }
        )
    )
    assert main(["split", "--config", str(p), "--out", str(tmp_path / "o")]) == 3
    assert _stderr_json(capsys)["error"] == "SchemaError"


def test_missing_fixture_exit_3(tmp_path, capsys):
    assert main(["report", "--fixtures", str(tmp_path / "none.csv"), "--out", str(tmp_path)]) == 3


def test_env_out_override(config_file, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QSARBENCH_OUT", str(tmp_path / "env"))
    assert main(["split", "--config", str(config_file)]) == 0
    assert (tmp_path / "env" / "folds" / "ames.folds.csv").exists()


def test_bad_jobs_env(config_file, tmp_path, monkeypatch):
    monkeypatch.setenv("QSARBENCH_JOBS", "many")
    assert main(["split", "--config", str(config_file), "--out", str(tmp_path)]) == 2


def test_selfcheck_quick(capsys):
    assert main(["selfcheck", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS" in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qsarbench", "report", "--fixtures", "paper_tables.csv", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0 and "leading_family" in proc.stdout

import json
import os
import subprocess
import sys

import pytest

from verilab.config import RunConfig

from conftest import CORPUS_ROOT, FAKE_VERIFIER, ensure_executable


def run_cli(*args, cwd=None, env=None):
    cmd = [sys.executable, "-m", "verilab.cli", *args]
    return subprocess.run(cmd, capture_output=True, text=True, cwd=cwd,
                          env={**os.environ, **(env or {})})


def test_help_lists_subcommands():
    result = run_cli("--help")
    assert result.returncode == 0
    for name in ("prepare", "run", "validate", "report"):
        assert name in result.stdout


def test_prepare_writes_skeletons_and_prompts(tmp_path):
    result = run_cli(
        "prepare",
        "--corpus", str(CORPUS_ROOT / "dafny"),
        "--language", "dafny",
        "--mode", "3",
        "--out", str(tmp_path / "prepared"),
    )
    assert result.returncode == 0, result.stderr
    task_dir = tmp_path / "prepared" / "001_sum_product"
    skeleton = (task_dir / "skeleton.dfy").read_text(encoding="utf-8")
    assert "TODO: implement the method body" in skeleton
    assert "s := s + nums[i];" not in skeleton
    user = (task_dir / "prompt-user.txt").read_text(encoding="utf-8")
    assert skeleton.rstrip("\n") in user
    assert (task_dir / "prompt-system.txt").exists()
    assert (task_dir / "prompt-followup.txt").exists()


def test_validate_command_tamper_verdict(tmp_path):
    task_dir = CORPUS_ROOT / "dafny" / "001_sum_product"
    reference = (task_dir / "task.dfy").read_text(encoding="utf-8")
    # candidate with markers stripped and one ensures deleted
    from verilab.corpus import strip_markers
    candidate = strip_markers(reference, "dafny").replace(
        "  ensures p == prod(nums)\n", ""
    )
    candidate_path = tmp_path / "candidate.dfy"
    candidate_path.write_text(candidate, encoding="utf-8")

    result = run_cli(
        "validate",
        "--task", str(task_dir),
        "--candidate", str(candidate_path),
        "--mode", "1",
        cwd=str(tmp_path),
    )
    assert result.returncode == 1
    verdict = json.loads(result.stdout)
    assert verdict["reason"] == "tampered"

    candidate_path.write_text(strip_markers(reference, "dafny"), encoding="utf-8")
    result = run_cli(
        "validate",
        "--task", str(task_dir),
        "--candidate", str(candidate_path),
        "--mode", "1",
        cwd=str(tmp_path),
    )
    assert result.returncode == 0, result.stdout
    assert json.loads(result.stdout)["reason"] == "ok"


def test_report_command_round_trip(tmp_path, corpora, fake_verifier, base_config):
    # build two records through the API, then aggregate via the CLI
    from test_runner import ScriptedClient, fenced
    from verilab.runner import run_benchmark

    base_config.retries = 0
    task = corpora["dafny"][2]  # 003_add
    client = ScriptedClient([fenced(task.program.source)])
    run_benchmark([task], [1], client, fake_verifier, base_config,
                  tmp_path / "results")

    result = run_cli(
        "report",
        "--in", str(tmp_path / "results"),
        "--format", "csv",
        "--out", str(tmp_path / "table.csv"),
    )
    assert result.returncode == 0, result.stderr
    rows = (tmp_path / "table.csv").read_text().splitlines()
    assert rows[1] == "dafny,1,1,1,100"


def test_run_rejects_replay_and_record_together(tmp_path):
    result = run_cli(
        "run",
        "--corpus", str(CORPUS_ROOT / "dafny"),
        "--language", "dafny",
        "--replay", str(FAKE_VERIFIER),
        "--record", str(tmp_path / "c.jsonl"),
        "--out", str(tmp_path / "out"),
    )
    assert result.returncode != 0
    assert "mutually exclusive" in result.stderr


def test_config_defaults_and_file(tmp_path):
    cfg = RunConfig.load(None)
    assert cfg.retries == 5
    assert cfg.timeouts_s["nagini"] == 120.0

    path = tmp_path / "verilab.yaml"
    path.write_text(
        "model_id: my-model\nretries: 2\ntimeouts_s:\n  dafny: 7\n"
        f"tools:\n  dafny: {ensure_executable(FAKE_VERIFIER)}\n",
        encoding="utf-8",
    )
    cfg = RunConfig.load(path)
    assert cfg.model_id == "my-model"
    assert cfg.retries == 2
    assert cfg.timeouts_s["dafny"] == 7
    assert cfg.timeouts_s["verus"] == 60.0  # merged, not replaced
    assert cfg.tools["dafny"].endswith("fake_verifier.py")


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "verilab.yaml"
    path.write_text("modle_id: typo\n", encoding="utf-8")
    with pytest.raises(ValueError):
        RunConfig.load(path)


def test_config_hash_tracks_result_relevant_fields():
    a = RunConfig()
    b = RunConfig()
    assert a.config_hash() == b.config_hash()
    b.retries = 1
    assert a.config_hash() != b.config_hash()
    c = RunConfig()
    c.workers = 16  # scheduling detail, not an outcome input
    assert a.config_hash() == c.config_hash()


def test_config_reads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("VERILAB_LLM_URL", "http://example.invalid/v1")
    monkeypatch.setenv("VERILAB_LLM_TOKEN", "sekret")
    cfg = RunConfig.load(None)
    assert cfg.llm_url == "http://example.invalid/v1"
    assert cfg.llm_token == "sekret"

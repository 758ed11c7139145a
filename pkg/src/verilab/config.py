"""Run configuration: verilab.yaml plus environment variables."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .verifier import DEFAULT_TIMEOUTS_S


@dataclass
class RunConfig:
    model_id: str = "claude-3.5-sonnet"
    temperature: float = 0.0
    seed: int | None = None
    retries: int = 5
    runs: int = 1
    workers: int = 1
    include_hints: bool = True
    include_sample: bool = True
    prompt_dir: str | None = None
    pattern_table: str | None = None
    tools: dict = field(default_factory=dict)        # language -> executable
    tool_args: dict = field(default_factory=dict)    # language -> extra argv
    timeouts_s: dict = field(default_factory=lambda: dict(DEFAULT_TIMEOUTS_S))
    llm_url: str | None = None                       # None -> VERILAB_LLM_URL
    llm_token: str | None = None                     # None -> VERILAB_LLM_TOKEN
    llm_max_retries: int = 3
    llm_backoff_s: float = 0.5
    request_timeout_s: float = 120.0
    max_concurrent_requests: int = 4
    min_request_interval_s: float = 0.0
    max_concurrent_verifiers: int = 2

    @classmethod
    def load(cls, path: Path | None = None) -> "RunConfig":
        """Read verilab.yaml when present; unknown keys are rejected."""
        cfg = cls()
        if path is None:
            default = Path("verilab.yaml")
            path = default if default.is_file() else None
        if path is not None:
            data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
            known = {f.name for f in fields(cls)}
            for key, value in data.items():
                if key not in known:
                    raise ValueError(f"{path}: unknown config key '{key}'")
                if key == "timeouts_s":
                    cfg.timeouts_s.update(value)
                else:
                    setattr(cfg, key, value)
        cfg.llm_url = cfg.llm_url or os.environ.get("VERILAB_LLM_URL")
        cfg.llm_token = cfg.llm_token or os.environ.get("VERILAB_LLM_TOKEN")
        return cfg

    def config_hash(self) -> str:
        """Hash of every setting that can change a run's outcome; used to
        content-address run records so resume never mixes configurations."""
        payload = json.dumps(
            {
                "model_id": self.model_id,
                "temperature": self.temperature,
                "seed": self.seed,
                "retries": self.retries,
                "include_hints": self.include_hints,
                "include_sample": self.include_sample,
                "prompt_dir": self.prompt_dir,
                "timeouts_s": self.timeouts_s,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

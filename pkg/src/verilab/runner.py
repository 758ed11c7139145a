"""Per-task verify-and-repair loop, benchmark scheduling, and reporting.

A work unit is (task, mode, run). Units are independent: each owns its
scratch directory and conversation, and every finished unit is persisted as
one JSON record under results/records/ (written atomically), so an
interrupted benchmark resumes by skipping completed records.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .corpus import BenchmarkTask
from .errors import IoError, LlmError, NoCodeFound, ToolchainMissing, VerilabError
from .llm import ChatClient, Conversation, extract_code
from .repair import apply_fixers
from .taskprep import PromptOptions, build_prompts, prepare_task
from .validator import ValidationOutcome, validate
from .verifier import (
    ClassifiedError,
    ErrorKind,
    VerdictReport,
    Verifier,
    render_errors,
)

log = logging.getLogger(__name__)


@dataclass
class Attempt:
    index: int
    candidate: str
    fixers_applied: list[str]
    verdict: VerdictReport
    validation: ValidationOutcome | None = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "candidate": self.candidate,
            "fixers_applied": self.fixers_applied,
            "verdict": self.verdict.to_dict(),
            "validation": self.validation.to_dict() if self.validation else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Attempt":
        return cls(
            index=data["index"],
            candidate=data["candidate"],
            fixers_applied=list(data["fixers_applied"]),
            verdict=VerdictReport.from_dict(data["verdict"]),
            validation=ValidationOutcome.from_dict(data["validation"])
            if data.get("validation")
            else None,
        )


@dataclass
class RunRecord:
    task_id: str
    language: str
    mode: int
    run_index: int
    attempts: list[Attempt]
    outcome: str  # success | exhausted | aborted
    transcript: Conversation
    detail: str = ""
    model_id: str = ""
    temperature: float = 0.0
    seed: int | None = None
    config_hash: str = ""

    @property
    def succeeded(self) -> bool:
        return self.outcome == "success"

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "language": self.language,
            "mode": self.mode,
            "run_index": self.run_index,
            "attempts": [a.to_dict() for a in self.attempts],
            "outcome": self.outcome,
            "transcript": self.transcript.to_dict(),
            "detail": self.detail,
            "model_id": self.model_id,
            "temperature": self.temperature,
            "seed": self.seed,
            "config_hash": self.config_hash,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            task_id=data["task_id"],
            language=data["language"],
            mode=data["mode"],
            run_index=data["run_index"],
            attempts=[Attempt.from_dict(a) for a in data["attempts"]],
            outcome=data["outcome"],
            transcript=Conversation.from_dict(data["transcript"]),
            detail=data.get("detail", ""),
            model_id=data.get("model_id", ""),
            temperature=data.get("temperature", 0.0),
            seed=data.get("seed"),
            config_hash=data.get("config_hash", ""),
        )


def _fill(template: str, errors_text: str) -> str:
    if "{{errors}}" in template:
        return template.replace("{{errors}}", errors_text)
    return template + "\n" + errors_text


def run_task(
    task: BenchmarkTask,
    mode: int,
    budget: int,
    client: ChatClient,
    verifier: Verifier,
    cfg: RunConfig,
    scratch_root: Path,
    run_index: int = 1,
) -> RunRecord:
    """One full pass of the loop: prompt, generate, fix, verify, validate,
    feed failures back, stop at the first candidate that both verifies and
    validates or when the repair budget runs out.

    LLM and toolchain failures abort the record instead of raising.
    """
    language = task.language.value
    options = PromptOptions(
        include_hints=cfg.include_hints,
        include_sample=cfg.include_sample,
        prompt_dir=Path(cfg.prompt_dir) if cfg.prompt_dir else None,
    )
    convo = Conversation(model_id=cfg.model_id, temperature=cfg.temperature)
    try:
        prepared = prepare_task(task, mode)
        bundle = build_prompts(prepared, options)
    except VerilabError as exc:
        return RunRecord(
            task_id=task.id, language=language, mode=mode, run_index=run_index,
            attempts=[], outcome="aborted", transcript=convo,
            detail=f"task preparation failed: {exc}",
            model_id=cfg.model_id, temperature=cfg.temperature, seed=cfg.seed,
            config_hash=cfg.config_hash(),
        )
    convo = Conversation.start(bundle.system, cfg.model_id, cfg.temperature)

    def finish(outcome: str, attempts: list[Attempt], detail: str = "") -> RunRecord:
        return RunRecord(
            task_id=task.id,
            language=language,
            mode=mode,
            run_index=run_index,
            attempts=attempts,
            outcome=outcome,
            transcript=convo,
            detail=detail,
            model_id=cfg.model_id,
            temperature=cfg.temperature,
            seed=cfg.seed,
            config_hash=cfg.config_hash(),
        )

    attempts: list[Attempt] = []
    message = bundle.user
    timeout_s = cfg.timeouts_s.get(language)

    for index in range(budget + 1):
        try:
            reply = client.send(convo, message)
        except LlmError as exc:
            return finish("aborted", attempts, f"llm failure: {exc}")

        attempt_dir = scratch_root / task.id / str(mode) / str(run_index) / str(index)
        attempt_dir.mkdir(parents=True, exist_ok=True)

        try:
            candidate = extract_code(reply, language)
        except NoCodeFound as exc:
            verdict = VerdictReport(
                verified=False,
                errors=[ClassifiedError(ErrorKind.OTHER, str(exc))],
                raw_output="",
                wall_time=0.0,
            )
            attempts.append(Attempt(index, "", [], verdict))
            message = _fill(bundle.followup_template, render_errors(verdict.errors))
            continue

        candidate, fixers_applied = apply_fixers(candidate, language)

        try:
            verdict = verifier.verify(language, candidate, timeout_s, attempt_dir)
        except ToolchainMissing as exc:
            return finish("aborted", attempts, str(exc))

        if not verdict.verified:
            attempts.append(Attempt(index, candidate, fixers_applied, verdict))
            message = _fill(bundle.followup_template, render_errors(verdict.errors))
            continue

        try:
            validation = validate(
                candidate,
                task,
                mode,
                verify=lambda lang, src, scr: verifier.verify(lang, src, timeout_s, scr),
                scratch=attempt_dir / "validation",
                persist_dir=attempt_dir,
            )
        except ToolchainMissing as exc:
            return finish("aborted", attempts, str(exc))

        attempts.append(Attempt(index, candidate, fixers_applied, verdict, validation))
        if validation.passed:
            return finish("success", attempts)
        message = _fill(
            bundle.followup_validation_template,
            f"- [{validation.reason}] {validation.detail}",
        )

    return finish("exhausted", attempts)


# --- scheduling ----------------------------------------------------------------


def record_path(out_dir: Path, task_id: str, language: str, mode: int,
                run_index: int, config_hash: str) -> Path:
    key = f"{task_id}|{language}|{mode}|{run_index}|{config_hash}"
    digest = hashlib.sha256(key.encode("utf-8")).hexdigest()[:24]
    return Path(out_dir) / "records" / f"{digest}.json"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def run_benchmark(
    tasks: list[BenchmarkTask],
    modes: list[int],
    client: ChatClient,
    verifier: Verifier,
    cfg: RunConfig,
    out_dir: Path,
) -> "BenchmarkReport":
    """Execute every (task, mode, run) unit, persisting each record as it
    completes; already-persisted records are loaded, not re-run."""
    out_dir = Path(out_dir)
    scratch_root = out_dir / "scratch"
    config_hash = cfg.config_hash()
    units = [
        (task, mode, run)
        for task in tasks
        for mode in modes
        for run in range(1, cfg.runs + 1)
    ]

    def work(unit) -> RunRecord:
        task, mode, run = unit
        path = record_path(out_dir, task.id, task.language.value, mode, run,
                           config_hash)
        if path.is_file():
            log.info("skip %s mode %d run %d (already recorded)", task.id, mode, run)
            return RunRecord.from_dict(json.loads(path.read_text(encoding="utf-8")))
        record = run_task(task, mode, cfg.retries, client, verifier, cfg,
                          scratch_root, run_index=run)
        _write_atomic(path, json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n")
        log.info("%s mode %d run %d: %s (%d attempts)", task.id, mode, run,
                 record.outcome, len(record.attempts))
        return record

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(work, units))
    else:
        records = [work(u) for u in units]

    report = aggregate(records)
    for fmt in ("json", "markdown", "csv"):
        emit_report(report, fmt, out_dir / f"report.{_EXT[fmt]}")
    return report


# --- aggregation -----------------------------------------------------------------


@dataclass
class ModeCell:
    total: int
    unique_verified: int
    percentage: int

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "unique_verified": self.unique_verified,
            "percentage": self.percentage,
        }


@dataclass
class BenchmarkReport:
    # language -> mode (as str, json-friendly) -> cell
    cells: dict = field(default_factory=dict)
    # language -> error kind -> count over all attempts
    error_histograms: dict = field(default_factory=dict)
    # mode (as str) -> language -> sorted list of succeeded task ids
    success_sets: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "cells": {
                lang: {mode: cell.to_dict() for mode, cell in by_mode.items()}
                for lang, by_mode in self.cells.items()
            },
            "error_histograms": self.error_histograms,
            "success_sets": self.success_sets,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BenchmarkReport":
        return cls(
            cells={
                lang: {
                    mode: ModeCell(c["total"], c["unique_verified"], c["percentage"])
                    for mode, c in by_mode.items()
                }
                for lang, by_mode in data["cells"].items()
            },
            error_histograms={
                lang: dict(hist) for lang, hist in data["error_histograms"].items()
            },
            success_sets={
                mode: {lang: list(ids) for lang, ids in by_lang.items()}
                for mode, by_lang in data["success_sets"].items()
            },
        )


def percentage(unique: int, total: int) -> int:
    """Round half up to the nearest integer percent."""
    if total == 0:
        return 0
    return int(math.floor(100 * unique / total + 0.5))


def aggregate(records: list[RunRecord]) -> BenchmarkReport:
    """Unique-union success counting plus error histograms.

    A task counts as verified for a (language, mode) cell when at least one
    of its runs succeeded; re-ordering the records never changes the result.
    """
    task_ids: dict[tuple[str, int], set] = {}
    successes: dict[tuple[str, int], set] = {}
    histograms: dict[str, Counter] = {}

    for record in records:
        key = (record.language, record.mode)
        task_ids.setdefault(key, set()).add(record.task_id)
        successes.setdefault(key, set())
        if record.succeeded:
            successes[key].add(record.task_id)
        hist = histograms.setdefault(record.language, Counter())
        for attempt in record.attempts:
            for error in attempt.verdict.errors:
                hist[error.kind.value] += 1

    report = BenchmarkReport()
    for (language, mode), ids in sorted(task_ids.items()):
        unique = len(successes[(language, mode)])
        cell = ModeCell(len(ids), unique, percentage(unique, len(ids)))
        report.cells.setdefault(language, {})[str(mode)] = cell
        report.success_sets.setdefault(str(mode), {})[language] = sorted(
            successes[(language, mode)]
        )
    report.error_histograms = {
        lang: {kind: count for kind, count in sorted(hist.items())}
        for lang, hist in sorted(histograms.items())
    }
    return report


# --- emission --------------------------------------------------------------------

_EXT = {"json": "json", "markdown": "md", "csv": "csv"}


def format_cell(cell: ModeCell) -> str:
    return f"{cell.unique_verified} ({cell.percentage}%)"


def _emit_markdown(report: BenchmarkReport) -> str:
    lines = ["# Benchmark report", "", "## Verified tasks by mode", ""]
    modes = sorted(
        {mode for by_mode in report.cells.values() for mode in by_mode},
        key=int,
    )
    header = "| Language | Tasks | " + " | ".join(f"Mode {m}" for m in modes) + " |"
    lines.append(header)
    lines.append("|" + "---|" * (len(modes) + 2))
    for language in sorted(report.cells):
        by_mode = report.cells[language]
        totals = {cell.total for cell in by_mode.values()}
        total = max(totals) if totals else 0
        row = [language, str(total)]
        for mode in modes:
            cell = by_mode.get(mode)
            row.append(format_cell(cell) if cell else "-")
        lines.append("| " + " | ".join(row) + " |")

    lines += ["", "## Most common errors", ""]
    for language in sorted(report.error_histograms):
        hist = report.error_histograms[language]
        lines += [f"### {language}", "", "| Error kind | Occurrences |", "|---|---|"]
        for kind, count in sorted(hist.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"| {kind} | {count} |")
        lines.append("")

    lines += ["## Cross-language overlap of verified tasks", ""]
    for mode in sorted(report.success_sets, key=int):
        by_lang = report.success_sets[mode]
        lines.append(f"### Mode {mode}")
        lines.append("")
        languages = sorted(by_lang)
        for i, first in enumerate(languages):
            for second in languages[i + 1 :]:
                common = set(by_lang[first]) & set(by_lang[second])
                lines.append(f"- {first} ∩ {second}: {len(common)}")
        if len(languages) > 2:
            common = set.intersection(*(set(by_lang[lang]) for lang in languages))
            lines.append(f"- {' ∩ '.join(languages)}: {len(common)}")
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def _emit_csv(report: BenchmarkReport) -> str:
    rows = ["language,mode,total,unique_verified,percentage"]
    for language in sorted(report.cells):
        for mode in sorted(report.cells[language], key=int):
            cell = report.cells[language][mode]
            rows.append(
                f"{language},{mode},{cell.total},{cell.unique_verified},{cell.percentage}"
            )
    return "\n".join(rows) + "\n"


def emit_report(report: BenchmarkReport, fmt: str, out_path: Path) -> Path:
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    elif fmt == "markdown":
        text = _emit_markdown(report)
    elif fmt == "csv":
        text = _emit_csv(report)
    else:
        raise ValueError(f"unknown report format '{fmt}'")
    out_path = Path(out_path)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write report to {out_path}: {exc}") from exc
    return out_path


def load_records(results_dir: Path) -> list[RunRecord]:
    records_dir = Path(results_dir) / "records"
    if not records_dir.is_dir():
        return []
    records = []
    for path in sorted(records_dir.glob("*.json")):
        try:
            records.append(RunRecord.from_dict(json.loads(path.read_text(encoding="utf-8"))))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise VerilabError(f"corrupt run record {path}: {exc}") from exc
    return records

"""Toolchain drivers for Dafny, Nagini, and Verus, plus error classification.

Each verify() call owns a scratch directory, writes the candidate there under
the language's expected file name, runs the external tool with a hard timeout,
and folds exit status + diagnostics into a VerdictReport. Classification maps
diagnostic text onto a fixed error taxonomy through a per-language pattern
table kept in a data file (verifier wording drifts between releases, so the
patterns record which version they were captured against).
"""

from __future__ import annotations

import logging
import re
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import yaml

from . import langs
from .errors import ToolchainMissing

log = logging.getLogger(__name__)

# feedback line used instead of raw output when the prover was killed; a bare
# timeout carries no actionable diagnostic for the model
TIMEOUT_FEEDBACK = (
    "verification timed out; simplify invariants or add intermediate assertions"
)

DEFAULT_TIMEOUTS_S = {"dafny": 60.0, "verus": 60.0, "nagini": 120.0}


class ErrorKind(str, Enum):
    INVARIANT_MAINTAIN = "invariant-maintain"
    INVARIANT_ENTRY = "invariant-entry"
    POSTCONDITION = "postcondition-not-proved"
    PRECONDITION = "precondition-not-satisfied"
    ASSERTION = "assertion-failed"
    UNRESOLVED = "unresolved-identifier"
    SYNTAX = "syntax-error"
    TYPE = "type-error"
    OVERFLOW = "arithmetic-overflow"
    TIMEOUT = "timeout"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


PROOF_FAILURE_KINDS = {
    ErrorKind.INVARIANT_MAINTAIN,
    ErrorKind.INVARIANT_ENTRY,
    ErrorKind.POSTCONDITION,
    ErrorKind.PRECONDITION,
    ErrorKind.ASSERTION,
}


@dataclass
class ClassifiedError:
    kind: ErrorKind
    message: str
    location: tuple[int, int] | None = None  # (line, column)

    def __post_init__(self):
        if self.kind is not ErrorKind.TIMEOUT and not self.message:
            raise ValueError("non-timeout errors need a message")

    def feedback_text(self) -> str:
        if self.kind is ErrorKind.TIMEOUT:
            return TIMEOUT_FEEDBACK
        return self.message

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "message": self.message,
            "location": list(self.location) if self.location else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassifiedError":
        loc = data.get("location")
        return cls(ErrorKind(data["kind"]), data["message"],
                   tuple(loc) if loc else None)


@dataclass
class VerdictReport:
    verified: bool
    errors: list[ClassifiedError]
    raw_output: str
    wall_time: float

    def __post_init__(self):
        if self.verified != (not self.errors):
            raise ValueError("verified must hold exactly when errors is empty")

    def to_dict(self) -> dict:
        return {
            "verified": self.verified,
            "errors": [e.to_dict() for e in self.errors],
            "raw_output": self.raw_output,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VerdictReport":
        return cls(
            verified=data["verified"],
            errors=[ClassifiedError.from_dict(e) for e in data["errors"]],
            raw_output=data["raw_output"],
            wall_time=data["wall_time"],
        )


# --- pattern table -----------------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    language: str
    kind: ErrorKind
    regex: re.Pattern
    verifier_version: str


_pattern_cache: dict[Path, list[Pattern]] = {}


def default_pattern_path() -> Path:
    return Path(__file__).parent / "patterns.yaml"


def load_patterns(path: Path | None = None) -> list[Pattern]:
    path = Path(path) if path else default_pattern_path()
    if path not in _pattern_cache:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
        _pattern_cache[path] = [
            Pattern(
                language=entry["language"],
                kind=ErrorKind(entry["kind"]),
                regex=re.compile(entry["regex"]),
                verifier_version=str(entry.get("verifier_version", "unknown")),
            )
            for entry in raw
        ]
    return _pattern_cache[path]


# --- diagnostic record extraction ---------------------------------------------

@dataclass
class Diagnostic:
    message: str
    location: tuple[int, int] | None = None


_DAFNY_LOC = re.compile(r"^(?P<file>\S+?)\((?P<line>\d+),(?P<col>\d+)\):\s*(?P<rest>.*)$")
_NAGINI_ERR = re.compile(r"^(?P<msg>.+\S)\s+\((?P<file>[^()@]+)@(?P<line>\d+)\.(?P<col>\d+)\)\s*$")
_MYPY_ERR = re.compile(r"^(?P<file>\S+\.py):(?P<line>\d+):(?:(?P<col>\d+):)?\s*error:\s*(?P<msg>.*)$")
_VERUS_HEAD = re.compile(r"^error(\[\w+\])?:")
_VERUS_LOC = re.compile(r"-->\s*\S+?:(\d+):(\d+)")


def parse_diagnostics(raw_output: str, language: str) -> list[Diagnostic]:
    """Split raw verifier output into individual diagnostic records."""
    if language == "dafny":
        return _parse_dafny(raw_output)
    if language == "nagini":
        return _parse_nagini(raw_output)
    if language == "verus":
        return _parse_verus(raw_output)
    raise ValueError(f"unknown language '{language}'")


def _parse_dafny(raw: str) -> list[Diagnostic]:
    out = []
    for line in raw.splitlines():
        m = _DAFNY_LOC.match(line.strip())
        if m:
            rest = m.group("rest")
            if rest.startswith("Related"):
                continue  # belongs to the preceding error
            if rest.startswith(("Error", "Verification Error", "Parse error")):
                out.append(Diagnostic(line.strip(),
                                      (int(m.group("line")), int(m.group("col")))))
        elif line.strip().startswith("Error: "):
            out.append(Diagnostic(line.strip()))
    return out


def _parse_nagini(raw: str) -> list[Diagnostic]:
    out = []
    for line in raw.splitlines():
        stripped = line.strip()
        m = _NAGINI_ERR.match(stripped)
        if m:
            out.append(Diagnostic(stripped, (int(m.group("line")), int(m.group("col")))))
            continue
        m = _MYPY_ERR.match(stripped)
        if m:
            col = int(m.group("col")) if m.group("col") else 0
            out.append(Diagnostic(stripped, (int(m.group("line")), col)))
            continue
        # "Verification failed" / "Translation failed" are banners, not records
        if stripped.startswith("Invalid program"):
            out.append(Diagnostic(stripped))
    return out


def _parse_verus(raw: str) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    block: list[str] = []

    def close() -> None:
        if not block:
            return
        text = "\n".join(block)
        loc_match = _VERUS_LOC.search(text)
        loc = (int(loc_match.group(1)), int(loc_match.group(2))) if loc_match else None
        out.append(Diagnostic(text, loc))
        block.clear()

    for line in raw.splitlines():
        if line.strip().startswith("error: aborting due to"):
            close()  # rustc summary, not a diagnostic
            continue
        if _VERUS_HEAD.match(line.strip()):
            close()
            block.append(line.rstrip())
        elif block:
            if re.match(r"^(warning|note:|verification results)", line.strip()):
                close()
            else:
                block.append(line.rstrip())
    close()
    return out


def classify(raw_output: str, language: str,
             pattern_path: Path | None = None) -> list[ClassifiedError]:
    """One ClassifiedError per diagnostic; unmatched records fall back to `other`."""
    patterns = [p for p in load_patterns(pattern_path) if p.language == language]
    errors = []
    for diag in parse_diagnostics(raw_output, language):
        kind = ErrorKind.OTHER
        for pattern in patterns:
            if pattern.regex.search(diag.message):
                kind = pattern.kind
                break
        errors.append(ClassifiedError(kind, diag.message, diag.location))
    return errors


# --- toolchain driver ----------------------------------------------------------

class Verifier:
    """Runs candidates through the configured toolchains.

    `tools` maps language name to an executable path or name; `max_concurrent`
    caps simultaneously running verifier processes (SMT solvers are
    memory-hungry). Each call must own a distinct scratch directory.
    """

    def __init__(
        self,
        tools: dict[str, str] | None = None,
        *,
        timeouts_s: dict[str, float] | None = None,
        extra_args: dict[str, list[str]] | None = None,
        pattern_path: Path | None = None,
        max_concurrent: int = 2,
    ):
        self.tools = dict(tools or {})
        self.timeouts_s = {**DEFAULT_TIMEOUTS_S, **(timeouts_s or {})}
        self.extra_args = dict(extra_args or {})
        self.pattern_path = pattern_path
        self._semaphore = threading.Semaphore(max_concurrent)

    def tool_for(self, language: str) -> str:
        tool = self.tools.get(language, language)
        resolved = shutil.which(tool) or (tool if Path(tool).is_file() else None)
        if resolved is None:
            raise ToolchainMissing(language, tool)
        # the tool later runs with cwd inside the scratch dir, so a path that
        # was given relative to the invocation directory must be pinned now
        return str(Path(resolved).resolve()) if "/" in resolved else resolved

    def available(self, language: str) -> bool:
        try:
            self.tool_for(language)
            return True
        except ToolchainMissing:
            return False

    def command(self, language: str, source_name: str) -> list[str]:
        """Argv for one verification. The source is passed as a bare file name
        (the process runs inside the scratch dir): diagnostics then cite
        `candidate.<ext>` rather than an absolute path, keeping verifier
        output, and with it the follow-up prompts and replay fingerprints,
        independent of where the scratch tree lives."""
        tool = self.tool_for(language)
        extra = self.extra_args.get(language, [])
        if language == "dafny":
            return [tool, "verify", *extra, source_name]
        # nagini and verus take the file directly
        return [tool, *extra, source_name]

    def verify(
        self,
        language: str,
        source: str,
        timeout_s: float | None = None,
        scratch: Path | None = None,
    ) -> VerdictReport:
        language = str(language)
        timeout_s = timeout_s if timeout_s is not None else self.timeouts_s[language]
        scratch = Path(scratch) if scratch else Path.cwd() / "scratch"
        # the tool runs with cwd=scratch, so the file path must survive that
        scratch = scratch.resolve()
        scratch.mkdir(parents=True, exist_ok=True)

        ext = langs.info(language).extension
        source_name = f"candidate.{ext}"
        (scratch / source_name).write_text(source, encoding="utf-8")
        cmd = self.command(language, source_name)

        start = time.monotonic()
        timed_out = False
        try:
            with self._semaphore:
                proc = subprocess.run(
                    cmd,
                    cwd=scratch,
                    capture_output=True,
                    text=True,
                    timeout=timeout_s,
                )
            stdout, stderr, returncode = proc.stdout, proc.stderr, proc.returncode
        except OSError as exc:
            raise ToolchainMissing(language, f"{cmd[0]} ({exc})") from exc
        except subprocess.TimeoutExpired as exc:
            timed_out = True
            stdout = (exc.stdout or b"").decode("utf-8", "replace") \
                if isinstance(exc.stdout, bytes) else (exc.stdout or "")
            stderr = (exc.stderr or b"").decode("utf-8", "replace") \
                if isinstance(exc.stderr, bytes) else (exc.stderr or "")
            returncode = None
        wall_time = time.monotonic() - start

        (scratch / "stdout.txt").write_text(stdout, encoding="utf-8")
        (scratch / "stderr.txt").write_text(stderr, encoding="utf-8")
        raw = stdout + ("\n" + stderr if stderr else "")

        if timed_out:
            errors = [ClassifiedError(ErrorKind.TIMEOUT, "", None)]
        elif returncode == 0:
            errors = []
        else:
            errors = classify(raw, language, self.pattern_path)
            if not errors:
                # tool crashed or produced unrecognizable output
                detail = stderr.strip() or stdout.strip() or "no output"
                errors = [ClassifiedError(
                    ErrorKind.OTHER,
                    f"verifier exited with status {returncode}: {detail[:500]}",
                )]
        log.debug("verify %s: verified=%s wall=%.2fs", language, not errors, wall_time)
        return VerdictReport(
            verified=not errors,
            errors=errors,
            raw_output=raw,
            wall_time=wall_time,
        )


def render_errors(errors: list[ClassifiedError]) -> str:
    """Error list formatted for a follow-up prompt."""
    lines = []
    for err in errors:
        loc = f" (line {err.location[0]})" if err.location else ""
        lines.append(f"- [{err.kind.value}]{loc} {err.feedback_text()}")
    return "\n".join(lines)

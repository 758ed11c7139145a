"""Benchmark task format: annotated reference solutions and their region model.

A task directory holds a verified reference solution whose interesting parts
are wrapped in marker comments, a natural-language description, and metadata:

    <root>/<task-id>/task.<ext>        annotated reference solution
    <root>/<task-id>/description.md    problem statement
    <root>/<task-id>/meta.yaml         id + list of target method names

Markers sit on their own line inside a host-language line comment and never
survive parsing, so the reference file stays verifiable as-is:

    // <vc-invariant>
      invariant s == total(nums[..i])
    // </vc-invariant>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from . import langs
from .errors import (
    CorpusLintError,
    DuplicateId,
    MissingDescription,
    OverlapViolation,
    ParseError,
    UnbalancedMarker,
    UnknownKind,
)


class Language(str, Enum):
    DAFNY = "dafny"
    NAGINI = "nagini"
    VERUS = "verus"

    def __str__(self) -> str:
        return self.value


class RegionKind(str, Enum):
    SPEC_FUNCTION = "spec-function"
    PRECONDITION = "precondition"
    POSTCONDITION = "postcondition"
    INVARIANT = "invariant"
    ASSERTION = "assertion"
    LEMMA_CALL = "lemma-call"
    SIGNATURE = "signature"
    IMPL_BODY = "impl-body"
    HELPER = "helper"

    def __str__(self) -> str:
        return self.value


# marker keyword -> region kind
MARKER_KINDS = {
    "spec-fn": RegionKind.SPEC_FUNCTION,
    "pre": RegionKind.PRECONDITION,
    "post": RegionKind.POSTCONDITION,
    "invariant": RegionKind.INVARIANT,
    "assert": RegionKind.ASSERTION,
    "lemma-call": RegionKind.LEMMA_CALL,
    "signature": RegionKind.SIGNATURE,
    "impl": RegionKind.IMPL_BODY,
    "helper": RegionKind.HELPER,
}

# which kinds may nest inside which (None = top level)
_ALLOWED_PARENT: dict[RegionKind, RegionKind | None] = {
    RegionKind.SPEC_FUNCTION: None,
    RegionKind.SIGNATURE: None,
    RegionKind.IMPL_BODY: None,
    RegionKind.HELPER: None,
    RegionKind.PRECONDITION: RegionKind.SIGNATURE,
    RegionKind.POSTCONDITION: RegionKind.SIGNATURE,
    RegionKind.INVARIANT: RegionKind.IMPL_BODY,
    RegionKind.ASSERTION: RegionKind.IMPL_BODY,
    RegionKind.LEMMA_CALL: RegionKind.IMPL_BODY,
}

_MARKER_RE = re.compile(r"^(\s*)(//|#)\s*<(/?)vc-([a-z-]+)>\s*$")


@dataclass(frozen=True)
class Span:
    """Half-open line/column range into the marker-free source."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def slice(self, source: str) -> str:
        lines = source.splitlines(keepends=True)
        offsets = [0]
        for ln in lines:
            offsets.append(offsets[-1] + len(ln))
        start = offsets[self.start_line] + self.start_col
        end = offsets[self.end_line] + self.end_col
        return source[start:end]


@dataclass
class Region:
    kind: RegionKind
    span: Span
    text: str
    owner: str | None = None
    children: list["Region"] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class AnnotatedProgram:
    language: Language
    source: str                  # marker-free reference text
    regions: list[Region]        # top-level regions, in source order
    targets: list[str] = field(default_factory=list)

    def all_regions(self) -> list[Region]:
        out: list[Region] = []
        for r in self.regions:
            out.extend(r.walk())
        return out

    def signature_for(self, target: str) -> Region:
        matches = [
            r for r in self.all_regions()
            if r.kind is RegionKind.SIGNATURE and r.owner == target
        ]
        if len(matches) != 1:
            raise ValueError(
                f"target '{target}' matches {len(matches)} signature regions"
            )
        return matches[0]


@dataclass
class BenchmarkTask:
    id: str
    program: AnnotatedProgram
    description: str
    provenance: dict = field(default_factory=dict)

    @property
    def language(self) -> Language:
        return self.program.language


def parse_annotated(
    marked_source: str, language: Language, targets: list[str] | None = None
) -> AnnotatedProgram:
    """Parse marker comments out of a reference solution into a region tree."""
    language = Language(language)
    leader = langs.info(language.value).comment_leader

    out_lines: list[str] = []          # marker-free lines, keepends
    top: list[Region] = []
    # stack entries: (kind, start_out_line, input_line_no, children accumulator)
    stack: list[tuple[RegionKind, int, int, list[Region]]] = []

    for lineno, raw in enumerate(marked_source.splitlines(keepends=True), start=1):
        m = _MARKER_RE.match(raw.rstrip("\r\n"))
        if not m:
            out_lines.append(raw)
            continue
        _, found_leader, closing, keyword = m.groups()
        if found_leader != leader:
            # a marker in the wrong comment syntax is not a marker for this language
            out_lines.append(raw)
            continue
        if keyword not in MARKER_KINDS:
            raise UnknownKind(keyword, lineno)
        kind = MARKER_KINDS[keyword]
        if not closing:
            parent_kind = stack[-1][0] if stack else None
            if _ALLOWED_PARENT[kind] is not parent_kind:
                where = f"inside {parent_kind.value}" if parent_kind else "at top level"
                raise OverlapViolation(
                    f"region '{kind.value}' may not open {where}", lineno
                )
            stack.append((kind, len(out_lines), lineno, []))
        else:
            if not stack:
                raise UnbalancedMarker(f"'</vc-{keyword}>' without opening marker", lineno)
            open_kind, start, open_line, children = stack.pop()
            if open_kind is not kind:
                raise UnbalancedMarker(
                    f"'</vc-{keyword}>' closes '<vc-{_keyword_of(open_kind)}>' "
                    f"opened at line {open_line}",
                    lineno,
                )
            span = Span(start, 0, len(out_lines), 0)
            region = Region(kind=kind, span=span, text="".join(out_lines[start:]),
                            children=children)
            if stack:
                stack[-1][3].append(region)
            else:
                top.append(region)

    if stack:
        kind, _, open_line, _ = stack[-1]
        raise UnbalancedMarker(
            f"'<vc-{_keyword_of(kind)}>' opened here is never closed", open_line
        )

    source = "".join(out_lines)
    _assign_owners(language, top)
    program = AnnotatedProgram(language=language, source=source, regions=top,
                               targets=list(targets or []))
    _check_invariants(program)
    return program


def _keyword_of(kind: RegionKind) -> str:
    return next(k for k, v in MARKER_KINDS.items() if v is kind)


def _assign_owners(language: Language, top: list[Region]) -> None:
    last_signature_owner: str | None = None
    for region in top:
        if region.kind in (RegionKind.SIGNATURE, RegionKind.SPEC_FUNCTION,
                           RegionKind.HELPER):
            region.owner = langs.declared_name(language.value, region.text)
            if region.kind is RegionKind.SIGNATURE:
                last_signature_owner = region.owner
        elif region.kind is RegionKind.IMPL_BODY:
            region.owner = last_signature_owner
        for child in region.children:
            for node in child.walk():
                node.owner = region.owner


def _check_invariants(program: AnnotatedProgram) -> None:
    for region in program.all_regions():
        if region.span.slice(program.source) != region.text:
            raise AssertionError(
                f"region {region.kind.value} text does not match its span"
            )
    for target in program.targets:
        program.signature_for(target)  # raises unless exactly one match


def reconstruct(program: AnnotatedProgram) -> str:
    """Interleave non-region source with region texts, in order."""
    lines = program.source.splitlines(keepends=True)
    pieces: list[str] = []
    cursor = 0
    for region in program.regions:
        pieces.append("".join(lines[cursor : region.span.start_line]))
        pieces.append(region.text)
        cursor = region.span.end_line
    pieces.append("".join(lines[cursor:]))
    return "".join(pieces)


def strip_markers(marked_source: str, language: Language) -> str:
    """Marker-free text computed directly, independent of the parser."""
    leader = langs.info(Language(language).value).comment_leader
    kept = []
    for raw in marked_source.splitlines(keepends=True):
        m = _MARKER_RE.match(raw.rstrip("\r\n"))
        if m and m.group(2) == leader:
            continue
        kept.append(raw)
    return "".join(kept)


def regions_of(program: AnnotatedProgram, kinds: set[RegionKind]) -> list[Region]:
    """All regions of the given kinds, flattened in source order."""
    return [r for r in program.all_regions() if r.kind in kinds]


_LINT_PATTERNS: dict[Language, list[tuple[re.Pattern, str]]] = {
    Language.DAFNY: [
        (re.compile(r"\bpredicate\s+\w"), "predicates are not wrappable; use functions"),
        (re.compile(r"\bclass\s+\w"), "classes are not supported"),
    ],
    Language.NAGINI: [
        (re.compile(r"^\s*class\s+\w", re.M), "classes are not supported"),
    ],
    Language.VERUS: [
        (re.compile(r"\b(open|closed)\s+spec\s+fn\b"), "open/closed spec fns are not supported"),
        (re.compile(r"\bclass\s+\w"), "classes are not supported"),
    ],
}


def lint_program(program: AnnotatedProgram) -> None:
    """Reject constructs the wrapper generator cannot handle."""
    for pattern, why in _LINT_PATTERNS[program.language]:
        m = pattern.search(program.source)
        if m:
            raise CorpusLintError(f"{why} (found {m.group(0)!r})")


def load_task(task_dir: Path, language: Language) -> BenchmarkTask:
    language = Language(language)
    ext = langs.info(language.value).extension
    source_path = task_dir / f"task.{ext}"
    description_path = task_dir / "description.md"
    meta_path = task_dir / "meta.yaml"

    if not description_path.is_file():
        raise MissingDescription(f"{task_dir}: description.md is missing")
    description = description_path.read_text(encoding="utf-8")
    if not description.strip():
        raise MissingDescription(f"{task_dir}: description.md is empty")

    try:
        meta = yaml.safe_load(meta_path.read_text(encoding="utf-8"))
        marked = source_path.read_text(encoding="utf-8")
        program = parse_annotated(marked, language, targets=meta.get("targets", []))
        lint_program(program)
    except (OSError, yaml.YAMLError, ValueError) as exc:
        raise ParseError(task_dir, exc) from exc
    except (UnbalancedMarker, UnknownKind, OverlapViolation, CorpusLintError) as exc:
        raise ParseError(source_path, exc) from exc

    provenance = {k: v for k, v in meta.items() if k not in ("id", "targets")}
    return BenchmarkTask(id=str(meta["id"]), program=program,
                         description=description, provenance=provenance)


def load_corpus(root: Path, language: Language) -> list[BenchmarkTask]:
    """One task per directory under `root`, sorted by id."""
    root = Path(root)
    tasks: list[BenchmarkTask] = []
    seen: dict[str, Path] = {}
    for task_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        task = load_task(task_dir, language)
        if task.id in seen:
            raise DuplicateId(
                f"id '{task.id}' used by both {seen[task.id]} and {task_dir}"
            )
        seen[task.id] = task_dir
        tasks.append(task)
    tasks.sort(key=lambda t: t.id)
    return tasks

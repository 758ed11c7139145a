"""Six-mode task preparation: region erasure and prompt assembly.

The modes trade away progressively more of the reference solution:

    1  proof annotations erased, code and contracts given
    2  proof annotations + contracts erased (spec inferred from code)
    3  proof annotations + method bodies erased (code from exact spec)
    4  like 3, plus the natural-language description
    5  contracts + bodies + proofs erased; spec functions and description given
    6  like 5, but spec functions withheld too
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import langs
from .corpus import BenchmarkTask, Region, RegionKind
from .errors import MissingDescription, TemplateMissing

_PROOF = {RegionKind.INVARIANT, RegionKind.ASSERTION, RegionKind.LEMMA_CALL}
_CONTRACT = {RegionKind.PRECONDITION, RegionKind.POSTCONDITION}


@dataclass(frozen=True)
class ModeSpec:
    erased: frozenset[RegionKind]
    include_description: bool
    include_spec_functions: bool


_MODE_TABLE: dict[int, ModeSpec] = {
    1: ModeSpec(frozenset(_PROOF), False, True),
    2: ModeSpec(frozenset(_PROOF | _CONTRACT), False, True),
    3: ModeSpec(frozenset(_PROOF | {RegionKind.IMPL_BODY}), False, True),
    4: ModeSpec(frozenset(_PROOF | {RegionKind.IMPL_BODY}), True, True),
    5: ModeSpec(frozenset(_PROOF | _CONTRACT | {RegionKind.IMPL_BODY}), True, True),
    6: ModeSpec(
        frozenset(_PROOF | _CONTRACT | {RegionKind.IMPL_BODY, RegionKind.SPEC_FUNCTION}),
        True,
        False,
    ),
}

MODES = tuple(sorted(_MODE_TABLE))

# modes where the contracts are given and must survive untouched
SPEC_GIVEN_MODES = (1, 3, 4)
# modes where the model produces the specification itself
SPEC_GENERATING_MODES = (2, 5, 6)


def mode_spec(mode: int) -> ModeSpec:
    try:
        return _MODE_TABLE[mode]
    except KeyError:
        raise ValueError(f"mode must be 1..6, got {mode}") from None


PLACEHOLDERS: dict[RegionKind, str] = {
    RegionKind.INVARIANT: "TODO: add loop invariants",
    RegionKind.ASSERTION: "TODO: add assertions",
    RegionKind.LEMMA_CALL: "TODO: add lemma calls",
    RegionKind.PRECONDITION: "TODO: add preconditions",
    RegionKind.POSTCONDITION: "TODO: add postconditions",
    RegionKind.IMPL_BODY: "TODO: implement the method body",
    RegionKind.SPEC_FUNCTION: "TODO: define any specification functions used by the contracts",
}


@dataclass(frozen=True)
class ProtectedRegion:
    kind: RegionKind
    owner: str | None
    text: str


@dataclass
class PreparedTask:
    task_id: str
    language: str
    mode: int
    skeleton: str
    protected: list[ProtectedRegion]
    targets: list[str]
    description: str | None = None


def _is_erased(region: Region, spec: ModeSpec, targets: set[str]) -> bool:
    if region.kind not in spec.erased:
        return False
    if region.kind is RegionKind.SPEC_FUNCTION:
        return True
    return region.owner in targets


def _indent_of(text: str) -> str:
    first = text.splitlines()[0] if text else ""
    return first[: len(first) - len(first.lstrip())]


def _render(region: Region, spec: ModeSpec, targets: set[str], leader: str) -> str:
    """Region text with erased descendants replaced by placeholder comments."""
    pieces: list[str] = []
    cursor = region.span.start_line
    lines = region.text.splitlines(keepends=True)
    base = region.span.start_line
    for child in region.children:
        pieces.append("".join(lines[cursor - base : child.span.start_line - base]))
        if _is_erased(child, spec, targets):
            pieces.append(f"{_indent_of(child.text)}{leader} {PLACEHOLDERS[child.kind]}\n")
        else:
            pieces.append(_render(child, spec, targets, leader))
        cursor = child.span.end_line
    pieces.append("".join(lines[cursor - base :]))
    return "".join(pieces)


def _fragments(region: Region, spec: ModeSpec, targets: set[str]) -> list[str]:
    """Maximal pieces of a region's text that survive erasure, placeholders excluded."""
    frags: list[str] = []
    current: list[str] = []

    def emit_gap(text: str) -> None:
        current.append(text)

    def cut() -> None:
        text = "".join(current)
        if text.strip():
            frags.append(text)
        current.clear()

    def go(r: Region) -> None:
        lines = r.text.splitlines(keepends=True)
        base = r.span.start_line
        cursor = base
        for child in r.children:
            emit_gap("".join(lines[cursor - base : child.span.start_line - base]))
            if _is_erased(child, spec, targets):
                cut()
            else:
                go(child)
            cursor = child.span.end_line
        emit_gap("".join(lines[cursor - base :]))

    go(region)
    cut()
    return frags


def prepare_task(task: BenchmarkTask, mode: int) -> PreparedTask:
    """Erase the mode's regions from the reference and collect what must survive."""
    spec = mode_spec(mode)
    if spec.include_description and not task.description.strip():
        raise MissingDescription(f"task {task.id}: mode {mode} requires a description")

    program = task.program
    targets = set(program.targets)
    leader = langs.info(program.language.value).comment_leader
    lines = program.source.splitlines(keepends=True)

    pieces: list[str] = []
    cursor = 0
    for region in program.regions:
        pieces.append("".join(lines[cursor : region.span.start_line]))
        if _is_erased(region, spec, targets):
            pieces.append(f"{_indent_of(region.text)}{leader} {PLACEHOLDERS[region.kind]}\n")
        else:
            pieces.append(_render(region, spec, targets, leader))
        cursor = region.span.end_line
    pieces.append("".join(lines[cursor:]))
    skeleton = "".join(pieces)

    protected: list[ProtectedRegion] = []
    for region in program.regions:
        is_target_region = region.owner in targets and region.kind in (
            RegionKind.SIGNATURE,
            RegionKind.IMPL_BODY,
        )
        is_kept_spec_fn = (
            region.kind is RegionKind.SPEC_FUNCTION and spec.include_spec_functions
        )
        if not (is_target_region or is_kept_spec_fn):
            continue
        if _is_erased(region, spec, targets):
            continue
        for frag in _fragments(region, spec, targets):
            protected.append(ProtectedRegion(region.kind, region.owner, frag))

    return PreparedTask(
        task_id=task.id,
        language=program.language.value,
        mode=mode,
        skeleton=skeleton,
        protected=protected,
        targets=list(program.targets),
        description=task.description if spec.include_description else None,
    )


# --- prompt assembly ---------------------------------------------------------

@dataclass(frozen=True)
class PromptOptions:
    include_hints: bool = True
    include_sample: bool = True
    prompt_dir: Path | None = None  # None = templates packaged with verilab


@dataclass
class PromptBundle:
    system: str
    user: str
    followup_template: str
    followup_validation_template: str = ""


def default_prompt_dir() -> Path:
    return Path(__file__).parent / "prompts"


def _read_template(base: Path, language: str, name: str, required: bool = True) -> str:
    path = base / language / name
    if not path.is_file():
        if required:
            raise TemplateMissing(f"prompt template not found: {path}")
        return ""
    return path.read_text(encoding="utf-8")


def build_prompts(prepared: PreparedTask, options: PromptOptions | None = None) -> PromptBundle:
    """Assemble the system/user/follow-up prompts for one prepared task.

    The user prompt is the fixed stack: mode description, optional language
    hints, optional verified sample, optional problem description, skeleton.
    Templates may place `{{description}}` / `{{skeleton}}` themselves; unused
    slots are appended in the order above.
    """
    options = options or PromptOptions()
    base = options.prompt_dir or default_prompt_dir()
    language = prepared.language
    ext = langs.info(language).extension
    tag = langs.info(language).fence_tags[0]

    system = _read_template(base, language, "system.txt")
    mode_text = _read_template(base, language, f"mode-{prepared.mode}.txt")

    sections = [mode_text.rstrip("\n")]
    if options.include_hints:
        hints = _read_template(base, language, "hints.txt", required=False)
        if hints.strip():
            sections.append(hints.rstrip("\n"))
    if options.include_sample:
        sample = _read_template(base, language, f"sample.{ext}", required=False)
        if sample.strip():
            sections.append(
                "Here is a sample of verified {} code:\n```{}\n{}\n```".format(
                    language, tag, sample.rstrip("\n")
                )
            )
    user = "\n\n".join(sections)

    description = (prepared.description or "").rstrip("\n")
    if "{{description}}" in user:
        user = user.replace("{{description}}", description)
    elif prepared.description is not None:
        user += "\n\nProblem description:\n" + description

    skeleton_block = "```{}\n{}\n```".format(tag, prepared.skeleton.rstrip("\n"))
    if "{{skeleton}}" in user:
        user = user.replace("{{skeleton}}", skeleton_block)
    else:
        user += "\n\nInput code:\n" + skeleton_block

    followup = _read_template(base, language, "followup.txt")
    followup_validation = _read_template(
        base, language, "followup-validation.txt", required=False
    )
    return PromptBundle(
        system=system,
        user=user,
        followup_template=followup,
        followup_validation_template=followup_validation or followup,
    )

"""Candidate validation: tamper checks and specification-implication wrappers.

A verified candidate is not necessarily a good answer. In modes where the
contracts were given, the model may have weakened or deleted them; in modes
where it wrote its own contracts, they may be vacuous. For the former we
check that every protected region survives verbatim. For the latter we append
one wrapper method per target that carries the reference method's contract
and simply calls the candidate's method: the wrapper verifies exactly when
the reference preconditions establish the candidate's (candidate may be
weaker) and the candidate's postconditions prove the reference's (candidate
may be stronger).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import langs
from .corpus import AnnotatedProgram, BenchmarkTask, Region, RegionKind
from .errors import SignatureMismatch, TargetMissing
from .taskprep import SPEC_GIVEN_MODES, PreparedTask, prepare_task
from .verifier import PROOF_FAILURE_KINDS, VerdictReport

VerifyFn = Callable[[str, str, Path], VerdictReport]
"""(language, source, scratch dir) -> verdict; injected so tests can stub it."""


@dataclass
class ValidationPlan:
    augmented_source: str
    wrappers: list[tuple[str, str]] = field(default_factory=list)  # (target, wrapper)


@dataclass
class ValidationOutcome:
    passed: bool
    reason: str  # ok | tampered | implication-failed | wrapper-verification-error
    detail: str = ""

    def __post_init__(self):
        if self.passed != (self.reason == "ok"):
            raise ValueError("passed must hold exactly when reason is 'ok'")

    def to_dict(self) -> dict:
        return {"passed": self.passed, "reason": self.reason, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: dict) -> "ValidationOutcome":
        return cls(data["passed"], data["reason"], data.get("detail", ""))


def normalize_ws(text: str) -> str:
    """Collapse every whitespace run to one space; comparison is then
    invariant under reflowing, reindenting, and blank-line edits."""
    return re.sub(r"\s+", " ", text).strip()


def check_untampered(candidate: str, prepared: PreparedTask) -> ValidationOutcome:
    """Every protected region must appear in the candidate verbatim modulo
    whitespace."""
    haystack = normalize_ws(candidate)
    for region in prepared.protected:
        needle = normalize_ws(region.text)
        if needle and needle not in haystack:
            owner = f" of {region.owner}" if region.owner else ""
            return ValidationOutcome(
                False,
                "tampered",
                f"{region.kind.value} region{owner} was altered or deleted: "
                f"{needle[:120]!r}",
            )
    return ValidationOutcome(True, "ok")


# --- wrapper synthesis ---------------------------------------------------------


def _region_children_text(region: Region, kind: RegionKind) -> str:
    return "".join(c.text for c in region.children if c.kind is kind)


def _unique_wrapper_name(target: str, candidate: str, language: str) -> str:
    base = f"{target}_valid"
    name = base
    suffix = 0
    while langs.definition_re(language, name).search(candidate):
        suffix += 1
        name = f"{base}_{suffix}"
    return name


def _check_candidate_signature(language: str, candidate: str, reference: "langs.Signature") -> None:
    cand_sig = langs.parse_signature(language, candidate, reference.name)
    if cand_sig.arity != reference.arity:
        raise SignatureMismatch(
            f"'{reference.name}' takes {cand_sig.arity} parameters in the candidate "
            f"but {reference.arity} in the reference"
        )
    if language == "dafny" and len(cand_sig.out_names) != len(reference.out_names):
        raise SignatureMismatch(
            f"'{reference.name}' returns {len(cand_sig.out_names)} values in the "
            f"candidate but {len(reference.out_names)} in the reference"
        )


def _emit_wrapper(language: str, wrapper_name: str, sig: "langs.Signature",
                  pre_text: str, post_text: str) -> str:
    args = ", ".join(sig.param_names)
    if language == "dafny":
        head = f"method {wrapper_name}({sig.params_src})"
        if sig.outs_src:
            head += f" returns ({sig.outs_src})"
        call = (f"  {', '.join(sig.out_names)} := {sig.name}({args});"
                if sig.out_names else f"  {sig.name}({args});")
        return f"{head}\n{pre_text}{post_text}{{\n{call}\n}}\n"
    if language == "nagini":
        ret = f" -> {sig.return_clause}" if sig.return_clause else ""
        body = (f"    return {sig.name}({args})"
                if sig.return_clause and sig.return_clause != "None"
                else f"    {sig.name}({args})")
        return f"def {wrapper_name}({sig.params_src}){ret}:\n{pre_text}{post_text}{body}\n"
    if language == "verus":
        head = f"fn {wrapper_name}({sig.params_src})"
        if sig.return_clause:
            head += f" {sig.return_clause}"
        return f"{head}\n{pre_text}{post_text}{{\n    {sig.name}({args})\n}}\n"
    raise ValueError(language)


def synthesize_wrappers(reference: AnnotatedProgram, candidate: str) -> ValidationPlan:
    """Candidate text plus reference spec functions (where missing) plus one
    contract-carrying wrapper per target. The candidate is kept as a verbatim
    prefix of the augmented source."""
    language = reference.language.value
    additions: list[str] = []
    renames: dict[str, str] = {}

    spec_fns = [r for r in reference.regions if r.kind is RegionKind.SPEC_FUNCTION]
    appended_fns: list[str] = []
    for fn_region in spec_fns:
        name = fn_region.owner
        if not name:
            appended_fns.append(fn_region.text)
            continue
        if langs.definition_re(language, name).search(candidate):
            if normalize_ws(fn_region.text) in normalize_ws(candidate):
                # candidate kept the reference definition; the wrapper can use
                # it directly, which spares the verifier a function-equality
                # proof it would routinely give up on
                continue
            # candidate redefined it; append the reference copy under a fresh
            # name so the wrapper provably means the original
            fresh = f"{name}_ref"
            while langs.definition_re(language, fresh).search(candidate):
                fresh += "_ref"
            renames[name] = fresh
        appended_fns.append(fn_region.text)

    def apply_renames(text: str) -> str:
        for old, new in renames.items():
            text = re.sub(rf"\b{re.escape(old)}\b", new, text)
        return text

    additions.extend(apply_renames(text) for text in appended_fns)

    wrappers: list[tuple[str, str]] = []
    for target in reference.targets:
        if not langs.definition_re(language, target).search(candidate):
            raise TargetMissing(target)
        sig_region = reference.signature_for(target)
        ref_sig = langs.parse_signature(language, sig_region.text, target)
        _check_candidate_signature(language, candidate, ref_sig)

        pre_text = apply_renames(_region_children_text(sig_region, RegionKind.PRECONDITION))
        post_text = apply_renames(_region_children_text(sig_region, RegionKind.POSTCONDITION))
        wrapper_name = _unique_wrapper_name(target, candidate, language)
        wrappers.append((target, wrapper_name))
        additions.append(_emit_wrapper(language, wrapper_name, ref_sig,
                                       pre_text, post_text))

    block = "\n".join(additions)
    if language == "verus":
        # items may live in any number of verus! blocks within one file
        block = "verus! {\n\n" + block + "\n} // verus!\n"
    prefix = candidate if candidate.endswith("\n") else candidate + "\n"
    return ValidationPlan(augmented_source=prefix + "\n" + block, wrappers=wrappers)


def validate(
    candidate: str,
    task: BenchmarkTask,
    mode: int,
    verify: VerifyFn | None = None,
    scratch: Path | None = None,
    persist_dir: Path | None = None,
) -> ValidationOutcome:
    """Decide whether a stand-alone-verified candidate honors the task."""
    if mode in SPEC_GIVEN_MODES:
        prepared = prepare_task(task, mode)
        return check_untampered(candidate, prepared)

    if verify is None:
        raise ValueError(f"mode {mode} validation needs a verify capability")
    try:
        plan = synthesize_wrappers(task.program, candidate)
    except (TargetMissing, SignatureMismatch) as exc:
        return ValidationOutcome(False, "wrapper-verification-error", str(exc))

    language = task.program.language.value
    scratch = Path(scratch) if scratch else Path.cwd() / "validation-scratch"
    verdict = verify(language, plan.augmented_source, scratch)

    if verdict.verified:
        outcome = ValidationOutcome(True, "ok")
    elif all(e.kind in PROOF_FAILURE_KINDS for e in verdict.errors):
        outcome = ValidationOutcome(
            False,
            "implication-failed",
            "wrapper contract not provable from the candidate's specification:\n"
            + "\n".join(e.message for e in verdict.errors if e.message),
        )
    else:
        # the verifier choked on the augmented file (type/resolution trouble,
        # timeout, helper-equality give-ups) rather than refuting implication
        outcome = ValidationOutcome(
            False,
            "wrapper-verification-error",
            "\n".join(e.message or e.kind.value for e in verdict.errors),
        )

    if persist_dir is not None:
        persist_dir = Path(persist_dir)
        persist_dir.mkdir(parents=True, exist_ok=True)
        ext = langs.info(language).extension
        (persist_dir / f"validation.{ext}").write_text(
            plan.augmented_source, encoding="utf-8"
        )
        (persist_dir / "validation-verdict.json").write_text(
            json.dumps(
                {"outcome": outcome.to_dict(), "verdict": verdict.to_dict()},
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )
    return outcome

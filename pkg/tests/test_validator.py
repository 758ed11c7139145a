import re
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from verilab.corpus import RegionKind
from verilab.errors import SignatureMismatch, TargetMissing
from verilab.taskprep import prepare_task
from verilab.validator import (
    check_untampered,
    normalize_ws,
    synthesize_wrappers,
    validate,
)
from verilab.verifier import ClassifiedError, ErrorKind, VerdictReport

from conftest import LANGUAGES


def reference_source(corpora, lang, index=0):
    task = corpora[lang][index]
    return task, task.program.source


def swap_region_text(program, region, new_text: str) -> str:
    """Reference source with one region's text replaced."""
    lines = program.source.splitlines(keepends=True)
    before = "".join(lines[: region.span.start_line])
    after = "".join(lines[region.span.end_line :])
    return before + new_text + after


# --- tamper checks -----------------------------------------------------------------


def test_intact_candidate_passes(corpora):
    task, source = reference_source(corpora, "dafny")
    outcome = check_untampered(source, prepare_task(task, 1))
    assert outcome.passed and outcome.reason == "ok"


def test_deleted_postcondition_is_tampered(corpora):
    task, source = reference_source(corpora, "dafny")
    mutated = source.replace("  ensures p == prod(nums)\n", "")
    outcome = check_untampered(mutated, prepare_task(task, 1))
    assert not outcome.passed
    assert outcome.reason == "tampered"


def test_renamed_spec_function_is_tampered(corpora):
    task, source = reference_source(corpora, "dafny")
    mutated = re.sub(r"\bprod\b", "product", source)
    outcome = check_untampered(mutated, prepare_task(task, 1))
    assert not outcome.passed
    assert outcome.reason == "tampered"


def test_added_invariants_still_pass(corpora):
    # the whole point of mode 1: new proof text is fine, given text is not
    task, source = reference_source(corpora, "dafny")
    candidate = source.replace(
        "  for i := 0 to |nums|\n",
        "  for i := 0 to |nums|\n    invariant 0 <= i <= |nums|\n",
    )
    outcome = check_untampered(candidate, prepare_task(task, 1))
    assert outcome.passed


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_tamper_check_invariant_under_whitespace_edits(corpora, data):
    task, source = reference_source(corpora, "nagini")
    prepared = prepare_task(task, 1)
    lines = source.splitlines()
    edited = []
    for line in lines:
        # random trailing blanks and interleaved blank lines
        edited.append(line + " " * data.draw(st.integers(0, 3)))
        if data.draw(st.booleans()):
            edited.append("")
    candidate = "\n".join(edited) + "\n"
    assert check_untampered(candidate, prepared).passed


def test_normalize_ws():
    assert normalize_ws("a\n  b\t c ") == "a b c"


# --- wrapper synthesis ----------------------------------------------------------------


@pytest.mark.parametrize("lang", LANGUAGES)
def test_self_wrappers_have_expected_shape(lang, corpora):
    for task in corpora[lang]:
        source = task.program.source
        plan = synthesize_wrappers(task.program, source)
        assert plan.augmented_source.startswith(source)
        assert [t for t, _ in plan.wrappers] == task.program.targets
        for target, wrapper in plan.wrappers:
            assert wrapper == f"{target}_valid"
            assert wrapper in plan.augmented_source
        tail = plan.augmented_source[len(source):]
        for region in task.program.regions:
            if region.kind is RegionKind.SIGNATURE:
                for child in region.children:
                    assert normalize_ws(child.text) in normalize_ws(tail)


def test_wrapper_body_calls_target(corpora):
    task = corpora["dafny"][0]
    plan = synthesize_wrappers(task.program, task.program.source)
    tail = plan.augmented_source[len(task.program.source):]
    assert "s, p := sum_product(nums);" in tail
    assert "ensures s == sum(nums)" in tail


def test_wrapper_name_collision_gets_suffix(corpora):
    task = corpora["dafny"][0]
    candidate = task.program.source + (
        "\nmethod sum_product_valid() returns (r: int)\n{\n  r := 0;\n}\n"
    )
    plan = synthesize_wrappers(task.program, candidate)
    assert plan.wrappers == [("sum_product", "sum_product_valid_1")]


def test_target_missing(corpora):
    task = corpora["dafny"][0]
    with pytest.raises(TargetMissing):
        synthesize_wrappers(task.program, "method something_else() { }\n")


def test_signature_mismatch(corpora):
    task = corpora["dafny"][0]
    candidate = (
        "method sum_product(nums: seq<int>, extra: int) returns (s: int, p: int)\n"
        "{\n  s := 0;\n  p := 1;\n}\n"
    )
    with pytest.raises(SignatureMismatch):
        synthesize_wrappers(task.program, candidate)


def test_redefined_spec_function_renamed(corpora):
    task = corpora["dafny"][0]
    # candidate defines its own prod with different text but keeps sum verbatim
    candidate = task.program.source.replace(
        "function prod(s: seq<int>): int {\n"
        "  if |s| == 0 then 1 else prod(s[..|s|-1]) * s[|s|-1]\n"
        "}",
        "function prod(s: seq<int>): int {\n"
        "  if s == [] then 1 else prod(s[..|s|-1]) * s[|s|-1]\n"
        "}",
    )
    plan = synthesize_wrappers(task.program, candidate)
    tail = plan.augmented_source[len(candidate):]
    assert "function prod_ref(s: seq<int>): int" in tail
    assert "ensures p == prod_ref(nums)" in tail
    # the verbatim-kept sum is not duplicated or renamed
    assert "sum_ref" not in tail
    assert "function sum(" not in tail


def test_missing_spec_function_appended(corpora):
    task = corpora["dafny"][0]
    # strip both spec functions from the candidate (mode 6 style output)
    source = task.program.source
    candidate = source[source.index("method sum_product"):]
    plan = synthesize_wrappers(task.program, candidate)
    tail = plan.augmented_source[len(candidate):]
    assert "function sum(s: seq<int>): int" in tail
    assert "function prod(s: seq<int>): int" in tail


def test_wrapper_for_dafny_method_without_outs():
    from verilab.corpus import parse_annotated

    marked = (
        "// <vc-signature>\n"
        "method check_positive(x: int)\n"
        "// <vc-pre>\n"
        "  requires x > 0\n"
        "// </vc-pre>\n"
        "// </vc-signature>\n"
        "// <vc-impl>\n"
        "{\n"
        "}\n"
        "// </vc-impl>\n"
    )
    program = parse_annotated(marked, "dafny", targets=["check_positive"])
    plan = synthesize_wrappers(program, program.source)
    tail = plan.augmented_source[len(program.source):]
    assert "method check_positive_valid(x: int)\n" in tail
    assert "  check_positive(x);" in tail
    assert ":=" not in tail


def test_wrapper_for_nagini_procedure_returning_none():
    from verilab.corpus import parse_annotated

    marked = (
        "# <vc-signature>\n"
        "def check_positive(x: int) -> None:\n"
        "# <vc-pre>\n"
        "    Requires(x > 0)\n"
        "# </vc-pre>\n"
        "# </vc-signature>\n"
        "# <vc-impl>\n"
        "    pass\n"
        "# </vc-impl>\n"
    )
    program = parse_annotated(marked, "nagini", targets=["check_positive"])
    plan = synthesize_wrappers(program, program.source)
    tail = plan.augmented_source[len(program.source):]
    assert "def check_positive_valid(x: int) -> None:" in tail
    assert "    check_positive(x)\n" in tail
    assert "return check_positive" not in tail


def test_verus_additions_live_in_new_verus_block(corpora):
    task = corpora["verus"][0]
    plan = synthesize_wrappers(task.program, task.program.source)
    tail = plan.augmented_source[len(task.program.source):]
    assert "verus! {" in tail
    assert tail.count("} // verus!") == 1


# --- validate dispatch ------------------------------------------------------------------


def fake_verify(verified: bool, kinds=()):
    def run(language, source, scratch):
        errors = [ClassifiedError(k, f"synthetic {k.value}") for k in kinds]
        return VerdictReport(
            verified=verified, errors=errors, raw_output="", wall_time=0.01
        )
    return run


def test_validate_spec_given_uses_tamper_check(corpora):
    task = corpora["dafny"][0]
    outcome = validate(task.program.source, task, 1)
    assert outcome.passed
    mutated = task.program.source.replace("  ensures p == prod(nums)\n", "")
    outcome = validate(mutated, task, 1)
    assert outcome.reason == "tampered"


def test_validate_spec_generating_ok(corpora):
    task = corpora["dafny"][0]
    outcome = validate(
        task.program.source, task, 2, verify=fake_verify(True), scratch=Path("unused")
    )
    assert outcome.passed


def test_validate_implication_failure(corpora):
    task = corpora["dafny"][0]
    outcome = validate(
        task.program.source, task, 2,
        verify=fake_verify(False, [ErrorKind.POSTCONDITION]),
        scratch=Path("unused"),
    )
    assert outcome.reason == "implication-failed"


def test_validate_wrapper_trouble_is_not_implication_failure(corpora):
    task = corpora["dafny"][0]
    outcome = validate(
        task.program.source, task, 2,
        verify=fake_verify(False, [ErrorKind.TIMEOUT]),
        scratch=Path("unused"),
    )
    assert outcome.reason == "wrapper-verification-error"


def test_validate_target_missing_is_wrapper_error(corpora):
    task = corpora["dafny"][0]
    outcome = validate(
        "method unrelated() { }\n", task, 2,
        verify=fake_verify(True), scratch=Path("unused"),
    )
    assert outcome.reason == "wrapper-verification-error"
    assert "sum_product" in outcome.detail


def test_validate_persists_artifacts(tmp_path, corpora):
    task = corpora["dafny"][0]
    validate(
        task.program.source, task, 2,
        verify=fake_verify(True),
        scratch=tmp_path / "scratch",
        persist_dir=tmp_path / "attempt",
    )
    assert (tmp_path / "attempt" / "validation.dfy").exists()
    assert (tmp_path / "attempt" / "validation-verdict.json").exists()

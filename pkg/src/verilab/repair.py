"""Deterministic syntactic repair applied to candidates before verification.

Fixers are token-level rewrites over a minimal lexer, not parsers: candidates
commonly do not parse at all, which is exactly when a cheap rewrite can save
one model round-trip. Every fixer must be idempotent and must never touch
string literals or comments.

The shipped set targets the mistakes models make in Nagini (Python-legal
syntax that the verifier rejects); the bool-literal and bang fixers are
extrapolations beyond the documented chained-comparison case and are labeled
as such in the README.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

_CMP_OPS = {"<", "<=", ">", ">=", "==", "!="}

# tokens that terminate a comparison chain; arithmetic and bitwise operators
# do not, since they bind tighter than comparison
_BOUNDARY_WORDS = {"and", "or", "not", "in", "is", "if", "else", "for", "while",
                   "lambda", "implies"}
_BOUNDARY_OPS = {",", ";", ":", "=", ":=", "&&", "||", "==>", "<==>", "=>", "::"}

_MULTI_OPS = ("<==>", "==>", "<==", "&&", "||", "<=", ">=", "==", "!=", ":=",
              "::", "->", "=>", "**", "//")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | str | comment | op | ws | group | raw
    text: str


def _lex(line: str, comment_leaders: tuple[str, ...]) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(line)
    while i < n:
        c = line[i]
        if any(line.startswith(lead, i) for lead in comment_leaders):
            tokens.append(Token("comment", line[i:]))
            break
        if c.isspace():
            j = i
            while j < n and line[j].isspace():
                j += 1
            tokens.append(Token("ws", line[i:j]))
            i = j
            continue
        if c in "\"'":
            j = i + 1
            while j < n:
                if line[j] == "\\":
                    j += 2
                    continue
                if line[j] == c:
                    j += 1
                    break
                j += 1
            else:
                j = n
            tokens.append(Token("str", line[i:j]))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (line[j].isalnum() or line[j] == "_"):
                j += 1
            tokens.append(Token("ident", line[i:j]))
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and (line[j].isalnum() or line[j] in "._"):
                j += 1
            tokens.append(Token("num", line[i:j]))
            i = j
            continue
        for op in _MULTI_OPS:
            if line.startswith(op, i):
                tokens.append(Token("op", op))
                i += len(op)
                break
        else:
            tokens.append(Token("op", c))
            i += 1
    return tokens


def _join(tokens: list[Token]) -> str:
    return "".join(t.text for t in tokens)


def _group_brackets(tokens: list[Token]) -> list[Token]:
    """Collapse every balanced (), [], {} run into one `group` token, with
    chain rewriting applied recursively inside."""
    out: list[Token] = []
    i = 0
    n = len(tokens)
    closers = {"(": ")", "[": "]", "{": "}"}
    while i < n:
        tok = tokens[i]
        if tok.kind == "op" and tok.text in closers:
            close = closers[tok.text]
            depth = 0
            j = i
            while j < n:
                t = tokens[j]
                if t.kind == "op" and t.text in closers:
                    depth += 1
                elif t.kind == "op" and t.text in closers.values():
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            inner = _rewrite_chains(tokens[i + 1 : j])
            closing = tokens[j].text if j < n else ""
            out.append(Token("group", tok.text + _join(inner) + closing))
            i = j + 1
        else:
            out.append(tok)
            i += 1
    return out


def _rewrite_chains(tokens: list[Token]) -> list[Token]:
    """Rewrite every maximal comparison chain at every nesting level."""
    tokens = _group_brackets(tokens)
    out: list[Token] = []
    segment_start = 0

    def is_boundary(t: Token) -> bool:
        return (t.kind == "op" and t.text in _BOUNDARY_OPS) or (
            t.kind == "ident" and t.text in _BOUNDARY_WORDS
        ) or t.kind == "comment"

    def flush() -> None:
        nonlocal out
        seg = out[segment_start:]
        rewritten, changed = _rewrite_flat_chain(seg)
        if changed:
            # `not` binds looser than a comparison but tighter than `and`,
            # so a chain under `not` must stay a single operand
            before = out[segment_start - 1] if segment_start > 0 else None
            if before is not None and before.kind == "ident" and before.text == "not":
                rewritten = [Token("raw", _wrap_parens(rewritten))]
            out = out[:segment_start] + rewritten

    for tok in tokens:
        if is_boundary(tok):
            flush()
            out.append(tok)
            segment_start = len(out)
        else:
            out.append(tok)
    flush()
    return out


def _wrap_parens(tokens: list[Token]) -> str:
    text = _join(tokens)
    stripped = text.strip()
    lead = text[: len(text) - len(text.lstrip())]
    tail = text[len(text.rstrip()) :]
    return f"{lead}({stripped}){tail}"


def _rewrite_flat_chain(segment: list[Token]) -> tuple[list[Token], bool]:
    """`a < b < c` -> `(a < b) and (b < c)` within one boundary-free segment."""
    cmp_positions = [
        idx for idx, t in enumerate(segment)
        if t.kind == "op" and t.text in _CMP_OPS
    ]
    if len(cmp_positions) < 2:
        return segment, False

    bounds = [-1] + cmp_positions + [len(segment)]
    operands = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        operand = _join(segment[lo + 1 : hi]).strip()
        if not operand:
            return segment, False  # malformed chain; leave untouched
        operands.append(operand)
    ops = [segment[idx].text for idx in cmp_positions]

    leading = segment[0].text if segment[0].kind == "ws" else ""
    trailing = segment[-1].text if len(segment) > 1 and segment[-1].kind == "ws" else ""
    pairs = [
        f"({operands[k]} {ops[k]} {operands[k + 1]})" for k in range(len(ops))
    ]
    return [Token("raw", leading + " and ".join(pairs) + trailing)], True


@dataclass(frozen=True)
class Fixer:
    id: str
    languages: frozenset[str]
    transform: Callable[[str], str]


def fix_chained_comparison(expr: str) -> str:
    """Expand chained comparisons in one expression line into conjunctions."""
    if sum(expr.count(op) for op in ("<", ">", "==", "!=")) < 2:
        return expr
    tokens = _lex(expr, ("#",))
    return _join(_rewrite_chains(tokens))


def _fix_chained_source(source: str) -> str:
    out = []
    for raw in source.splitlines(keepends=True):
        body = raw.rstrip("\n\r")
        eol = raw[len(body):]
        out.append(fix_chained_comparison(body) + eol)
    return "".join(out)


def _fix_bool_case(source: str, comment_leaders: tuple[str, ...],
                   mapping: dict[str, str]) -> str:
    out_lines = []
    for raw in source.splitlines(keepends=True):
        body = raw.rstrip("\n\r")
        eol = raw[len(body):]
        tokens = _lex(body, comment_leaders)
        rewritten = [
            Token(t.kind, mapping[t.text])
            if t.kind == "ident" and t.text in mapping else t
            for t in tokens
        ]
        out_lines.append(_join(rewritten) + eol)
    return "".join(out_lines)


def _fix_bang_not(source: str) -> str:
    out_lines = []
    for raw in source.splitlines(keepends=True):
        body = raw.rstrip("\n\r")
        eol = raw[len(body):]
        tokens = _lex(body, ("#",))
        rewritten = [
            Token("raw", "not ") if t.kind == "op" and t.text == "!" else t
            for t in tokens
        ]
        out_lines.append(_join(rewritten) + eol)
    return "".join(out_lines)


_REGISTRY: list[Fixer] = [
    Fixer(
        id="chained-comparison",
        languages=frozenset({"nagini"}),
        transform=_fix_chained_source,
    ),
    Fixer(
        id="bang-not",
        languages=frozenset({"nagini"}),
        transform=_fix_bang_not,
    ),
    Fixer(
        id="bool-literal-case",
        languages=frozenset({"nagini"}),
        transform=lambda s: _fix_bool_case(s, ("#",), {"true": "True", "false": "False"}),
    ),
    Fixer(
        id="bool-literal-case",
        languages=frozenset({"dafny", "verus"}),
        transform=lambda s: _fix_bool_case(s, ("//",), {"True": "true", "False": "false"}),
    ),
]


def registered_fixers(language: str | None = None) -> list[Fixer]:
    if language is None:
        return list(_REGISTRY)
    return [f for f in _REGISTRY if language in f.languages]


def register_fixer(fixer: Fixer) -> None:
    if any(f.id == fixer.id and f.languages & fixer.languages for f in _REGISTRY):
        raise ValueError(f"fixer id '{fixer.id}' already registered for those languages")
    _REGISTRY.append(fixer)


def apply_fixers(source: str, language: str) -> tuple[str, list[str]]:
    """Run every registered fixer for `language`; report the ids that fired."""
    applied = []
    for fixer in registered_fixers(str(language)):
        fixed = fixer.transform(source)
        if fixed != source:
            applied.append(fixer.id)
            source = fixed
    return source, applied

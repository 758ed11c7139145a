"""Per-backend language facts: comment syntax, file naming, signature parsing.

Everything here is intentionally shallow text processing. Candidates are
frequently unparseable by the real frontends, and the harness only ever needs
names, parameter lists, and splice points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SignatureMismatch


@dataclass(frozen=True)
class LanguageInfo:
    name: str
    extension: str
    comment_leader: str
    fence_tags: tuple[str, ...]
    keywords_hint: tuple[str, ...]  # tokens that mark a reply as code in this language


LANGUAGES: dict[str, LanguageInfo] = {
    "dafny": LanguageInfo(
        name="dafny",
        extension="dfy",
        comment_leader="//",
        fence_tags=("dafny", "dfy"),
        keywords_hint=("method ", "function ", "lemma ", "ensures", "invariant"),
    ),
    "nagini": LanguageInfo(
        name="nagini",
        extension="py",
        comment_leader="#",
        fence_tags=("python", "py", "nagini"),
        keywords_hint=("def ", "Invariant(", "Ensures(", "Requires("),
    ),
    "verus": LanguageInfo(
        name="verus",
        extension="rs",
        comment_leader="//",
        fence_tags=("rust", "rs", "verus"),
        keywords_hint=("fn ", "ensures", "invariant", "proof"),
    ),
}


def info(language: str) -> LanguageInfo:
    try:
        return LANGUAGES[language]
    except KeyError:
        raise ValueError(f"unknown language '{language}'") from None


_NAME_RES = {
    "dafny": re.compile(
        r"\b(?:ghost\s+|static\s+)*(?:method|function|lemma|predicate)\s+"
        r"(?:\{[^}]*\}\s*)?([A-Za-z_]\w*)"
    ),
    "nagini": re.compile(r"\bdef\s+([A-Za-z_]\w*)"),
    "verus": re.compile(r"\bfn\s+([A-Za-z_]\w*)"),
}


def declared_name(language: str, text: str) -> str | None:
    """First method/function name declared in a region's text, if any."""
    m = _NAME_RES[language].search(text)
    return m.group(1) if m else None


def definition_re(language: str, name: str) -> re.Pattern:
    """Matches a definition of `name` in candidate text (not a call site)."""
    if language == "dafny":
        return re.compile(
            r"\b(?:ghost\s+|static\s+)*(?:method|function|lemma|predicate)\s+"
            r"(?:\{[^}]*\}\s*)?" + re.escape(name) + r"\b"
        )
    if language == "nagini":
        return re.compile(r"\bdef\s+" + re.escape(name) + r"\b")
    if language == "verus":
        return re.compile(r"\bfn\s+" + re.escape(name) + r"\b")
    raise ValueError(language)


def _balanced(text: str, open_idx: int) -> int:
    """Index one past the parenthesis group opening at `open_idx`."""
    depth = 0
    for i in range(open_idx, len(text)):
        c = text[i]
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth -= 1
            if depth == 0:
                return i + 1
    raise SignatureMismatch(f"unbalanced parentheses in signature: {text[:80]!r}")


def split_params(params_src: str) -> list[str]:
    """Split a parameter list on top-level commas."""
    parts: list[str] = []
    depth = 0
    current = ""
    for c in params_src:
        if c in "([{<":
            depth += 1
        elif c in ")]}>":
            depth -= 1
        if c == "," and depth == 0:
            parts.append(current.strip())
            current = ""
        else:
            current += c
    if current.strip():
        parts.append(current.strip())
    return parts


def _param_name(decl: str) -> str:
    """Parameter name from a `name: type` declaration (Rust ref/mut stripped)."""
    head = decl.split(":", 1)[0].strip()
    head = re.sub(r"^(mut\s+|&\s*mut\s+|&\s*)", "", head)
    return head


@dataclass
class Signature:
    """What the wrapper generator needs to know about one method."""

    language: str
    name: str
    params_src: str              # raw text inside the parameter parens
    param_names: list[str]
    outs_src: str = ""           # dafny: raw text inside `returns (...)`
    out_names: list[str] = field(default_factory=list)
    return_clause: str = ""      # nagini `-> int` / verus `-> (r: i32)`, verbatim

    @property
    def arity(self) -> int:
        return len(self.param_names)


def parse_signature(language: str, text: str, name: str | None = None) -> Signature:
    """Parse the declaration of `name` (or the first declaration) out of `text`.

    Raises SignatureMismatch when no declaration is found or it cannot be
    read back.
    """
    if name is None:
        name = declared_name(language, text)
        if name is None:
            raise SignatureMismatch(f"no declaration found in: {text[:80]!r}")
    m = definition_re(language, name).search(text)
    if m is None:
        raise SignatureMismatch(f"no declaration of '{name}' found")
    open_idx = text.find("(", m.end())
    if open_idx < 0:
        raise SignatureMismatch(f"declaration of '{name}' has no parameter list")
    close = _balanced(text, open_idx)
    params_src = text[open_idx + 1 : close - 1]
    param_names = [_param_name(p) for p in split_params(params_src)]

    sig = Signature(language, name, params_src, param_names)
    rest = text[close:]
    if language == "dafny":
        rm = re.match(r"\s*returns\s*\(", rest)
        if rm:
            r_open = close + rm.end() - 1
            r_close = _balanced(text, r_open)
            sig.outs_src = text[r_open + 1 : r_close - 1]
            sig.out_names = [_param_name(p) for p in split_params(sig.outs_src)]
    elif language == "nagini":
        line = rest.split("\n", 1)[0]
        am = re.match(r"\s*->\s*([^:]+):", line)
        if am:
            sig.return_clause = am.group(1).strip()
    elif language == "verus":
        line = rest.split("\n", 1)[0].rstrip()
        if "->" in line:
            clause = line[line.index("->") :]
            sig.return_clause = clause.rstrip("{ ").rstrip()
    return sig

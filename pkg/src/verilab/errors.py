"""Exception types raised across the harness."""


class VerilabError(Exception):
    """Base class for all harness errors."""


# --- corpus ---------------------------------------------------------------

class CorpusError(VerilabError):
    pass


class UnbalancedMarker(CorpusError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownKind(CorpusError):
    def __init__(self, kind: str, line: int):
        super().__init__(f"line {line}: unknown region kind '{kind}'")
        self.kind = kind
        self.line = line


class OverlapViolation(CorpusError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MissingDescription(CorpusError):
    pass


class DuplicateId(CorpusError):
    pass


class ParseError(CorpusError):
    """Wraps a parse failure with the offending path."""

    def __init__(self, path, cause: Exception):
        super().__init__(f"{path}: {cause}")
        self.path = path
        self.cause = cause


class CorpusLintError(CorpusError):
    """Reference solution uses a construct the validator cannot wrap."""


# --- taskprep -------------------------------------------------------------

class TemplateMissing(VerilabError):
    pass


# --- llm ------------------------------------------------------------------

class LlmError(VerilabError):
    pass


class TransportError(LlmError):
    pass


class RateLimited(LlmError):
    pass


class CassetteMiss(LlmError):
    def __init__(self, fingerprint: str):
        super().__init__(f"no recorded reply for fingerprint {fingerprint}")
        self.fingerprint = fingerprint


class NoCodeFound(LlmError):
    pass


# --- verifier ---------------------------------------------------------------

class ToolchainMissing(VerilabError):
    def __init__(self, language: str, tool: str):
        super().__init__(
            f"no usable {language} toolchain: '{tool}' is not configured or not on PATH"
        )
        self.language = language
        self.tool = tool


# --- validator --------------------------------------------------------------

class TargetMissing(VerilabError):
    def __init__(self, target: str):
        super().__init__(f"candidate does not define target method '{target}'")
        self.target = target


class SignatureMismatch(VerilabError):
    pass


# --- runner -----------------------------------------------------------------

class IoError(VerilabError):
    pass

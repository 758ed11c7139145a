import os
import shutil
import stat
from pathlib import Path

import pytest

from verilab.config import RunConfig
from verilab.corpus import load_corpus
from verilab.verifier import Verifier

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_ROOT = REPO_ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
FAKE_VERIFIER = FIXTURES / "fake_verifier.py"

LANGUAGES = ("dafny", "nagini", "verus")
EXTENSIONS = {"dafny": "dfy", "nagini": "py", "verus": "rs"}


def ensure_executable(path: Path) -> Path:
    mode = path.stat().st_mode
    path.chmod(mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    return path


@pytest.fixture(scope="session")
def corpus_root() -> Path:
    return CORPUS_ROOT


@pytest.fixture(scope="session")
def corpora():
    return {lang: load_corpus(CORPUS_ROOT / lang, lang) for lang in LANGUAGES}


@pytest.fixture()
def fake_verifier() -> Verifier:
    """Verifier wired to the deterministic stub toolchain for every language."""
    tool = str(ensure_executable(FAKE_VERIFIER))
    return Verifier(
        tools={lang: tool for lang in LANGUAGES},
        timeouts_s={lang: 20.0 for lang in LANGUAGES},
    )


def real_tool_for(language: str) -> str | None:
    """A real toolchain binary, if one is configured or on PATH."""
    env = os.environ.get(f"VERILAB_TOOL_{language.upper()}")
    if env and (shutil.which(env) or Path(env).is_file()):
        return env
    return shutil.which(language)


def real_verifier() -> tuple[Verifier, list[str]]:
    tools = {}
    for language in LANGUAGES:
        tool = real_tool_for(language)
        if tool:
            tools[language] = tool
    return Verifier(tools=tools), sorted(tools)


def requires_toolchain(language: str):
    tool = real_tool_for(language)
    return pytest.mark.skipif(
        tool is None,
        reason=f"no {language} toolchain installed (set VERILAB_TOOL_{language.upper()} "
               f"or put '{language}' on PATH)",
    )


@pytest.fixture()
def base_config(tmp_path) -> RunConfig:
    cfg = RunConfig()
    cfg.tools = {lang: str(ensure_executable(FAKE_VERIFIER)) for lang in LANGUAGES}
    cfg.timeouts_s = {lang: 20.0 for lang in LANGUAGES}
    cfg.workers = 1
    return cfg

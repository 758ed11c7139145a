"""Chat-model conversations: one live HTTP adapter plus record/replay adapters.

Replay keys every request by a fingerprint of (model id, full turn list), so a
cassette recorded once makes the whole benchmark bit-deterministic in CI.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from . import langs
from .errors import CassetteMiss, NoCodeFound, RateLimited, TransportError

log = logging.getLogger(__name__)

URL_ENV = "VERILAB_LLM_URL"
TOKEN_ENV = "VERILAB_LLM_TOKEN"


@dataclass(frozen=True)
class ChatTurn:
    role: str  # system | user | assistant
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")
        if not self.content:
            raise ValueError("turn content must be non-empty")


@dataclass
class Conversation:
    model_id: str
    temperature: float = 0.0
    turns: list[ChatTurn] = field(default_factory=list)

    @classmethod
    def start(cls, system: str, model_id: str, temperature: float = 0.0) -> "Conversation":
        return cls(model_id=model_id, temperature=temperature,
                   turns=[ChatTurn("system", system)])

    def check(self) -> None:
        if not self.turns or self.turns[0].role != "system":
            raise ValueError("conversation must start with a system turn")
        for i, turn in enumerate(self.turns[1:]):
            expected = "user" if i % 2 == 0 else "assistant"
            if turn.role != expected:
                raise ValueError(f"turn {i + 1} must be {expected}, got {turn.role}")

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "temperature": self.temperature,
            "turns": [{"role": t.role, "content": t.content} for t in self.turns],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Conversation":
        return cls(
            model_id=data["model_id"],
            temperature=data["temperature"],
            turns=[ChatTurn(t["role"], t["content"]) for t in data["turns"]],
        )


def fingerprint(model_id: str, turns: list[ChatTurn]) -> str:
    """Stable hash of a request: model id plus the full turn list."""
    payload = json.dumps(
        {"model": model_id, "turns": [[t.role, t.content] for t in turns]},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ChatClient:
    """Interface: append a user message, obtain the assistant reply."""

    def send(self, conversation: Conversation, message: str) -> str:
        if not message:
            raise ValueError("message must be non-empty")
        conversation.check()
        request_turns = conversation.turns + [ChatTurn("user", message)]
        reply = self._complete(conversation.model_id, conversation.temperature,
                               request_turns)
        conversation.turns.append(ChatTurn("user", message))
        conversation.turns.append(ChatTurn("assistant", reply))
        return reply

    def _complete(self, model_id: str, temperature: float,
                  turns: list[ChatTurn]) -> str:
        raise NotImplementedError


class Cassette:
    """JSON Lines map from request fingerprint to recorded assistant reply."""

    def __init__(self, entries: dict[str, str] | None = None):
        self.entries = dict(entries or {})

    @classmethod
    def load(cls, path: Path) -> "Cassette":
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                entries[record["fp"]] = record["reply"]
        return cls(entries)


class ReplayClient(ChatClient):
    """Serves recorded replies; any unrecorded request is fatal."""

    def __init__(self, cassette: Cassette):
        self.cassette = cassette

    def _complete(self, model_id, temperature, turns):
        fp = fingerprint(model_id, turns)
        try:
            return self.cassette.entries[fp]
        except KeyError:
            raise CassetteMiss(fp) from None


class RecordingClient(ChatClient):
    """Passes requests through to `inner`, appending each exchange to a cassette file."""

    def __init__(self, inner: ChatClient, path: Path):
        self.inner = inner
        self.path = Path(path)
        self._lock = threading.Lock()

    def _complete(self, model_id, temperature, turns):
        reply = self.inner._complete(model_id, temperature, turns)
        fp = fingerprint(model_id, turns)
        line = json.dumps({"fp": fp, "reply": reply}, ensure_ascii=False)
        with self._lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
        return reply


class LiveClient(ChatClient):
    """Chat-completions-style HTTP adapter.

    Endpoint and auth come from VERILAB_LLM_URL / VERILAB_LLM_TOKEN unless
    passed explicitly. A shared semaphore caps concurrent requests and a
    minimum inter-request interval provides crude rate limiting.
    """

    def __init__(
        self,
        url: str | None = None,
        token: str | None = None,
        *,
        seed: int | None = None,
        request_timeout_s: float = 120.0,
        max_retries: int = 3,
        backoff_s: float = 0.5,
        max_concurrent: int = 4,
        min_interval_s: float = 0.0,
    ):
        self.url = url or os.environ.get(URL_ENV)
        if not self.url:
            raise TransportError(f"no endpoint configured (set {URL_ENV})")
        self.token = token if token is not None else os.environ.get(TOKEN_ENV)
        self.seed = seed
        self.request_timeout_s = request_timeout_s
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self._semaphore = threading.Semaphore(max_concurrent)
        self._interval = min_interval_s
        self._last_request = 0.0
        self._rate_lock = threading.Lock()
        self._client = httpx.Client(timeout=request_timeout_s)

    def _throttle(self) -> None:
        if self._interval <= 0:
            return
        with self._rate_lock:
            wait = self._last_request + self._interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()

    def _complete(self, model_id, temperature, turns):
        body = {
            "model": model_id,
            "temperature": temperature,
            "messages": [{"role": t.role, "content": t.content} for t in turns],
        }
        if self.seed is not None:
            body["seed"] = self.seed
        headers = {"Content-Type": "application/json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"

        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_s * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    self._throttle()
                    response = self._client.post(self.url, json=body, headers=headers)
            except httpx.HTTPError as exc:
                last_error = TransportError(f"request failed: {exc}")
                log.warning("llm request failed (attempt %d): %s", attempt + 1, exc)
                continue
            if response.status_code == 429:
                last_error = RateLimited("rate limited by endpoint")
                retry_after = response.headers.get("Retry-After")
                if retry_after:
                    try:
                        time.sleep(min(float(retry_after), 30.0))
                    except ValueError:
                        pass
                continue
            if response.status_code >= 500:
                last_error = TransportError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"endpoint returned {response.status_code}: {response.text[:200]}"
                )
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as exc:
                raise TransportError(f"malformed completion payload: {exc}") from exc
        raise last_error if last_error else TransportError("request failed")


_FENCE_RE = re.compile(r"```([^\n`]*)\n(.*?)```", re.S)


def extract_code(reply: str, language: str) -> str:
    """Candidate source out of a model reply.

    Preference order: first fenced block tagged for the language, longest
    fenced block, then the bare reply when it plausibly is code.
    """
    info = langs.info(str(language))
    blocks = [(tag.strip().lower(), body) for tag, body in _FENCE_RE.findall(reply)]
    for tag, body in blocks:
        if tag in info.fence_tags:
            return body.rstrip() + "\n"
    if blocks:
        body = max(blocks, key=lambda b: len(b[1]))[1]
        return body.rstrip() + "\n"

    lines = reply.splitlines()
    first = next(
        (i for i, ln in enumerate(lines)
         if any(k in ln for k in info.keywords_hint)),
        None,
    )
    if first is None:
        raise NoCodeFound("reply contains no fenced block and no recognizable code")
    codeish = re.compile(r"[{}();=\[\]]|^\s|" + "|".join(map(re.escape, info.keywords_hint)))
    last = max(i for i, ln in enumerate(lines) if not ln.strip() or codeish.search(ln))
    return "\n".join(lines[first : last + 1]).rstrip() + "\n"

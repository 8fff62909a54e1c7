"""Pluggable generation backends: remote chat-completions, replay, echo-gold.

Replay fixtures key completions by a SHA-256 digest of the exact prompt
bytes, so any drift in template rendering surfaces as a loud lookup miss
instead of a silently different answer.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field

import requests

from .errors import MissingFixtureEntry, SchemaMismatch, TransportError, UnreadableFile
from .templates import Record, build_router_corpus, build_solver_corpus

API_KEY_ENV_VAR = "TOOLQA_API_KEY"


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    max_new_units: int = 256
    temperature: float = 0.0

    def __post_init__(self):
        if self.max_new_units <= 0:
            raise ValueError("max_new_units must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass
class ReplayFixture:
    """Map from prompt digest to stored completion."""

    entries: dict[str, str] = field(default_factory=dict)

    def put(self, prompt: str, completion: str):
        self.entries[prompt_digest(prompt)] = completion

    def lookup(self, prompt: str) -> str | None:
        return self.entries.get(prompt_digest(prompt))

    def __len__(self) -> int:
        return len(self.entries)


def load_fixture(path: str) -> ReplayFixture:
    """Load a line-delimited {"prompt", "completion"} file.

    Duplicate prompts keep the last entry.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UnreadableFile(f"cannot read fixture {path}: {exc}") from exc
    fixture = ReplayFixture()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}:{lineno}: not a JSON object") from exc
        if (not isinstance(obj, dict)
                or not isinstance(obj.get("prompt"), str)
                or not isinstance(obj.get("completion"), str)):
            raise SchemaMismatch(
                f"{path}:{lineno}: expected string 'prompt' and 'completion' keys"
            )
        fixture.put(obj["prompt"], obj["completion"])
    return fixture


def save_fixture_lines(pairs, path: str):
    """Write (prompt, completion) pairs in the fixture/corpus line format."""
    with open(path, "w", encoding="utf-8") as fh:
        for prompt, completion in pairs:
            fh.write(json.dumps({"prompt": prompt, "completion": completion}) + "\n")


class ReplayBackend:
    """Deterministic offline backend replaying stored completions."""

    def __init__(self, fixture: ReplayFixture):
        self.fixture = fixture

    def generate(self, req: GenerationRequest) -> str:
        completion = self.fixture.lookup(req.prompt)
        if completion is None:
            raise MissingFixtureEntry(
                f"no fixture entry for prompt digest {prompt_digest(req.prompt)[:12]}..."
            )
        return completion


class EchoGoldBackend(ReplayBackend):
    """Replay backend primed with every gold router and solver completion.

    Drives end-to-end tests: routing prompts answer with the gold template
    name, solver prompts answer with the gold derivation or response.
    """

    def __init__(self, records: list[Record]):
        fixture = ReplayFixture()
        for example in build_router_corpus(records) + build_solver_corpus(records):
            fixture.put(example.prompt, example.completion)
        super().__init__(fixture)


class RemoteBackend:
    """Chat-completions-style HTTP backend.

    The prompt travels as a single user message; the first choice's message
    text comes back. The credential is read from the environment, never
    from configuration files.
    """

    def __init__(self, base_url: str, model_name: str, *, timeout_s: float = 60.0,
                 retries: int = 2, max_in_flight: int = 4,
                 session: requests.Session | None = None):
        self.base_url = base_url.rstrip("/")
        self.model_name = model_name
        self.timeout_s = timeout_s
        self.retries = retries
        self._gate = threading.BoundedSemaphore(max_in_flight)
        self._session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(API_KEY_ENV_VAR)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def generate(self, req: GenerationRequest) -> str:
        payload = {
            "model": self.model_name,
            "messages": [{"role": "user", "content": req.prompt}],
            "max_tokens": req.max_new_units,
            "temperature": req.temperature,
        }
        url = f"{self.base_url}/chat/completions"
        last_error = None
        for _ in range(self.retries + 1):
            try:
                with self._gate:
                    resp = self._session.post(
                        url, json=payload, headers=self._headers(),
                        timeout=self.timeout_s,
                    )
                resp.raise_for_status()
                body = resp.json()
                return body["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError,
                    TypeError, ValueError) as exc:
                last_error = exc
        raise TransportError(f"generation failed after {self.retries + 1} attempts: "
                             f"{last_error}") from last_error

"""Provider-agnostic chat completion: an OpenAI-compatible endpoint or an
offline mock keyed by prompt hash.

Mock scripts are JSON files in a directory, one per prompt pair::

    <sha256>.json  ->  {"key": "<sha256>", "responses": ["...", "..."]}

The key is ``sha256(system_prompt + "\\x1e" + user_prompt)``. Successive calls
with the same prompt pair walk the response list; the last entry repeats.
A response given as a JSON value rather than a string is serialized
compactly. Unregistered prompts get ``{"unmatched": true}`` with finish
reason ``unmatched``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any, Mapping, Protocol, Sequence

import requests

from wxreport.config import ProviderConfig
from wxreport.context import estimate_tokens
from wxreport.errors import (
    AuthenticationError,
    ConfigError,
    EmptyCompletionError,
    OutputError,
    PreconditionError,
    ProviderError,
)

logger = logging.getLogger(__name__)

UNMATCHED_TEXT = '{"unmatched": true}'
KEY_SEPARATOR = "\x1e"


class ResponseFormat(StrEnum):
    FREE_TEXT = "free_text"
    JSON_OBJECT = "json_object"


def prompt_key(system_prompt: str, user_prompt: str) -> str:
    """Stable hash of a prompt pair; names the mock script for it."""
    return hashlib.sha256((system_prompt + KEY_SEPARATOR + user_prompt).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatRequest:
    system_prompt: str
    user_prompt: str
    temperature: float = 0.2
    max_output_tokens: int = 1500
    response_format: ResponseFormat = ResponseFormat.JSON_OBJECT

    def __post_init__(self) -> None:
        if not self.system_prompt.strip() or not self.user_prompt.strip():
            raise PreconditionError("chat prompts must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise PreconditionError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_output_tokens < 1:
            raise PreconditionError("max_output_tokens must be positive")
        object.__setattr__(self, "response_format", ResponseFormat(self.response_format))

    @property
    def key(self) -> str:
        return prompt_key(self.system_prompt, self.user_prompt)


@dataclass(frozen=True)
class Usage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens


@dataclass(frozen=True)
class ChatResponse:
    text: str
    finish_reason: str
    usage: Usage = field(default_factory=Usage)
    model: str = ""

    @property
    def unmatched(self) -> bool:
        return self.finish_reason == "unmatched"


class ChatProvider(Protocol):
    model_id: str

    def complete(self, request: ChatRequest) -> ChatResponse: ...


# ---------------------------------------------------------------------------
# Live provider
# ---------------------------------------------------------------------------


class OpenAICompatibleProvider:
    """POSTs to ``{base_url}/chat/completions``. One HTTP round trip per call."""

    def __init__(self, config: ProviderConfig, session: requests.Session | None = None) -> None:
        if not config.api_key:
            raise ConfigError("live provider requires an API key")
        self._config = config
        self._session = session or requests.Session()
        self.model_id = config.model_id

    def _payload(self, request: ChatRequest) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "model": self._config.model,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        if request.response_format is ResponseFormat.JSON_OBJECT:
            payload["response_format"] = {"type": "json_object"}
        return payload

    def complete(self, request: ChatRequest) -> ChatResponse:
        url = self._config.base_url.rstrip("/") + "/chat/completions"
        logger.debug("POST %s model=%s key=%s", url, self._config.model, request.key[:12])
        try:
            resp = self._session.post(
                url,
                json=self._payload(request),
                headers={"Authorization": f"Bearer {self._config.api_key}"},
                timeout=self._config.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderError(f"request to {url} failed: {exc.__class__.__name__}") from None
        if resp.status_code in (401, 403):
            raise AuthenticationError(
                f"provider rejected the API key (HTTP {resp.status_code})", status=resp.status_code
            )
        if resp.status_code >= 400:
            raise ProviderError(
                f"provider returned HTTP {resp.status_code}: {resp.text[:200]}", status=resp.status_code
            )
        try:
            body = resp.json()
            choice = body["choices"][0]
            text = choice["message"].get("content") or ""
        except (ValueError, KeyError, IndexError, TypeError, AttributeError):
            raise ProviderError("malformed chat-completions response body") from None
        if not text.strip():
            raise EmptyCompletionError("provider returned an empty completion")
        usage = body.get("usage") or {}
        return ChatResponse(
            text=text,
            finish_reason=choice.get("finish_reason") or "stop",
            usage=Usage(int(usage.get("prompt_tokens", 0)), int(usage.get("completion_tokens", 0))),
            model=body.get("model", self._config.model),
        )


# ---------------------------------------------------------------------------
# Mock provider
# ---------------------------------------------------------------------------


def _as_text(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(value, ensure_ascii=False, separators=(",", ":"))


def load_scripts(directory: str | Path) -> dict[str, tuple[str, ...]]:
    """Read every ``*.json`` script in *directory* (sorted by file name)."""
    d = Path(directory)
    if not d.is_dir():
        raise ConfigError(f"mock script directory not found: {d}")
    scripts: dict[str, tuple[str, ...]] = {}
    for path in sorted(d.glob("*.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"unreadable mock script {path.name}: {exc}") from None
        responses = data.get("responses") if isinstance(data, dict) else None
        if not isinstance(responses, list) or not responses:
            raise ConfigError(f"mock script {path.name} needs a non-empty 'responses' list")
        scripts[data.get("key") or path.stem] = tuple(_as_text(r) for r in responses)
    logger.debug("loaded %d mock script(s) from %s", len(scripts), d)
    return scripts


def save_script(directory: str | Path, request: ChatRequest, responses: Sequence[Any]) -> Path:
    """Write the script answering *request* with *responses* in order."""
    if not responses:
        raise ValueError("a mock script needs at least one response")
    d = Path(directory)
    path = d / f"{request.key}.json"
    try:
        d.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps({"key": request.key, "responses": [_as_text(r) for r in responses]}, indent=2) + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        raise OutputError(f"cannot write mock script {path}: {exc.strerror or exc}") from None
    return path


class MockProvider:
    """Deterministic offline provider replaying scripted responses."""

    def __init__(self, scripts: Mapping[str, Sequence[Any]] | None = None, model: str = "mock") -> None:
        self._scripts = {k: tuple(_as_text(r) for r in v) for k, v in (scripts or {}).items()}
        self._cursors: dict[str, int] = {}
        self._lock = threading.Lock()
        self.model_id = model if model.startswith("mock") else f"mock/{model}"

    @classmethod
    def from_dir(cls, directory: str | Path, model: str = "mock") -> MockProvider:
        return cls(load_scripts(directory), model)

    def __contains__(self, request: ChatRequest) -> bool:
        return request.key in self._scripts

    def reset(self) -> None:
        with self._lock:
            self._cursors.clear()

    def complete(self, request: ChatRequest) -> ChatResponse:
        key = request.key
        usage_in = estimate_tokens(request.system_prompt) + estimate_tokens(request.user_prompt)
        script = self._scripts.get(key)
        if script is None:
            logger.warning("mock: no script for prompt %s", key[:12])
            return ChatResponse(UNMATCHED_TEXT, "unmatched", Usage(usage_in, 0), self.model_id)
        with self._lock:
            i = self._cursors.get(key, 0)
            self._cursors[key] = i + 1
        text = script[min(i, len(script) - 1)]
        logger.debug("mock: prompt %s -> response %d/%d", key[:12], min(i, len(script) - 1) + 1, len(script))
        return ChatResponse(text, "stop", Usage(usage_in, estimate_tokens(text)), self.model_id)


def make_provider(config: ProviderConfig) -> ChatProvider:
    if config.mode == "live":
        return OpenAICompatibleProvider(config)
    if config.mock_dir is not None and Path(config.mock_dir).is_dir():
        return MockProvider.from_dir(config.mock_dir, config.model_id)
    if config.mock_dir is not None:
        logger.warning("mock script directory %s does not exist; every prompt will be unmatched", config.mock_dir)
    return MockProvider(model=config.model_id)


def chat_complete(request: ChatRequest, provider: ChatProvider | ProviderConfig) -> ChatResponse:
    """Run one completion against a provider instance or a provider config."""
    if isinstance(provider, ProviderConfig):
        provider = make_provider(provider)
    return provider.complete(request)

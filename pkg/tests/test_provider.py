"""Tests for wxreport.agents.provider -- chat providers and mock scripts."""

from __future__ import annotations

import json

import pytest
import requests

from wxreport.agents.provider import (
    UNMATCHED_TEXT,
    ChatRequest,
    MockProvider,
    OpenAICompatibleProvider,
    ResponseFormat,
    chat_complete,
    load_scripts,
    make_provider,
    prompt_key,
    save_script,
)
from wxreport.config import ProviderConfig
from wxreport.errors import (
    AuthenticationError,
    ConfigError,
    EmptyCompletionError,
    PreconditionError,
    ProviderError,
)

REQUEST = ChatRequest("You are a forecaster.", "Describe the weather.")


class TestChatRequest:
    def test_key_is_stable(self):
        assert REQUEST.key == ChatRequest("You are a forecaster.", "Describe the weather.", temperature=1.0).key
        assert REQUEST.key == prompt_key("You are a forecaster.", "Describe the weather.")

    def test_key_separates_system_and_user(self):
        assert prompt_key("ab", "c") != prompt_key("a", "bc")

    def test_empty_prompt(self):
        with pytest.raises(PreconditionError):
            ChatRequest("  ", "user")

    def test_temperature_range(self):
        with pytest.raises(PreconditionError):
            ChatRequest("s", "u", temperature=2.5)

    def test_format_coerced(self):
        assert ChatRequest("s", "u", response_format="free_text").response_format is ResponseFormat.FREE_TEXT


class TestMockProvider:
    def test_walks_responses_then_repeats_last(self):
        provider = MockProvider({REQUEST.key: ["first", "second"]})
        texts = [provider.complete(REQUEST).text for _ in range(3)]
        assert texts == ["first", "second", "second"]

    def test_unmatched(self):
        response = MockProvider().complete(REQUEST)
        assert response.unmatched
        assert response.text == UNMATCHED_TEXT

    def test_json_values_serialized(self):
        provider = MockProvider({REQUEST.key: [{"a": 1}]})
        assert provider.complete(REQUEST).text == '{"a":1}'

    def test_reset(self):
        provider = MockProvider({REQUEST.key: ["first", "second"]})
        provider.complete(REQUEST)
        provider.reset()
        assert provider.complete(REQUEST).text == "first"

    def test_usage_estimated(self):
        response = MockProvider({REQUEST.key: ["abcdefgh"]}).complete(REQUEST)
        assert response.usage.completion_tokens == 2
        assert response.usage.prompt_tokens > 0

    def test_model_id(self):
        assert MockProvider(model="gpt-4o").model_id == "mock/gpt-4o"
        assert MockProvider().model_id == "mock"


class TestScripts:
    def test_save_then_load(self, tmp_path):
        path = save_script(tmp_path, REQUEST, ["one", {"two": 2}])
        assert path.name == f"{REQUEST.key}.json"
        scripts = load_scripts(tmp_path)
        assert scripts[REQUEST.key] == ("one", '{"two":2}')

    def test_provider_from_dir(self, tmp_path):
        save_script(tmp_path, REQUEST, ["scripted"])
        provider = make_provider(ProviderConfig(mode="mock", mock_dir=tmp_path))
        assert REQUEST in provider
        assert chat_complete(REQUEST, provider).text == "scripted"

    def test_missing_dir_gives_unmatched_provider(self, tmp_path):
        provider = make_provider(ProviderConfig(mode="mock", mock_dir=tmp_path / "absent"))
        assert provider.complete(REQUEST).unmatched

    def test_script_without_responses(self, tmp_path):
        (tmp_path / "bad.json").write_text(json.dumps({"key": "x", "responses": []}))
        with pytest.raises(ConfigError, match="responses"):
            load_scripts(tmp_path)

    def test_unreadable_script(self, tmp_path):
        (tmp_path / "bad.json").write_text("{")
        with pytest.raises(ConfigError, match="unreadable"):
            load_scripts(tmp_path)

    def test_save_needs_a_response(self, tmp_path):
        with pytest.raises(ValueError):
            save_script(tmp_path, REQUEST, [])


class _Resp:
    def __init__(self, status: int, body: object) -> None:
        self.status_code = status
        self._body = body
        self.text = json.dumps(body)

    def json(self) -> object:
        return self._body


class _Session:
    def __init__(self, resp: _Resp | Exception) -> None:
        self.resp = resp
        self.calls: list[dict] = []

    def post(self, url: str, **kwargs) -> _Resp:
        self.calls.append({"url": url, **kwargs})
        if isinstance(self.resp, Exception):
            raise self.resp
        return self.resp


LIVE = ProviderConfig(mode="live", base_url="https://llm.example/v1/", model="m-1", api_key="sk-test")


def completion(content: str, finish: str = "stop") -> dict:
    return {
        "model": "m-1-2024",
        "choices": [{"message": {"role": "assistant", "content": content}, "finish_reason": finish}],
        "usage": {"prompt_tokens": 12, "completion_tokens": 3},
    }


class TestOpenAICompatibleProvider:
    def test_payload_and_response(self):
        session = _Session(_Resp(200, completion('{"ok": true}')))
        response = OpenAICompatibleProvider(LIVE, session).complete(REQUEST)
        call = session.calls[0]
        assert call["url"] == "https://llm.example/v1/chat/completions"
        assert call["json"]["model"] == "m-1"
        assert call["json"]["messages"][0] == {"role": "system", "content": "You are a forecaster."}
        assert call["json"]["response_format"] == {"type": "json_object"}
        assert call["headers"]["Authorization"] == "Bearer sk-test"
        assert response.text == '{"ok": true}'
        assert response.usage.total_tokens == 15
        assert response.model == "m-1-2024"

    def test_free_text_has_no_response_format(self):
        session = _Session(_Resp(200, completion("text")))
        request = ChatRequest("s", "u", response_format=ResponseFormat.FREE_TEXT)
        OpenAICompatibleProvider(LIVE, session).complete(request)
        assert "response_format" not in session.calls[0]["json"]

    def test_auth_error(self):
        session = _Session(_Resp(401, {"error": "bad key"}))
        with pytest.raises(AuthenticationError) as exc_info:
            OpenAICompatibleProvider(LIVE, session).complete(REQUEST)
        assert exc_info.value.exit_code == 3

    def test_server_error(self):
        session = _Session(_Resp(500, {"error": "boom"}))
        with pytest.raises(ProviderError, match="HTTP 500"):
            OpenAICompatibleProvider(LIVE, session).complete(REQUEST)

    def test_empty_completion(self):
        session = _Session(_Resp(200, completion("   ")))
        with pytest.raises(EmptyCompletionError):
            OpenAICompatibleProvider(LIVE, session).complete(REQUEST)

    def test_malformed_body(self):
        session = _Session(_Resp(200, {"choices": []}))
        with pytest.raises(ProviderError, match="malformed"):
            OpenAICompatibleProvider(LIVE, session).complete(REQUEST)

    def test_transport_error(self):
        session = _Session(requests.ConnectionError("down"))
        with pytest.raises(ProviderError, match="ConnectionError"):
            OpenAICompatibleProvider(LIVE, session).complete(REQUEST)

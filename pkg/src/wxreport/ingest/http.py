"""Shared HTTP helper for the live data sources.

One GET, one optional retry on transport errors or 5xx, no backoff tuning.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

import requests

from wxreport.errors import FetchError

if TYPE_CHECKING:
    from wxreport.config import DataSourceConfig

logger = logging.getLogger(__name__)

_REDACTED_PARAMS = {"appid", "key", "api_key"}


def _loggable(params: dict[str, Any]) -> dict[str, Any]:
    return {k: ("***" if k in _REDACTED_PARAMS else v) for k, v in params.items()}


def http_get(
    source: DataSourceConfig,
    url: str,
    params: dict[str, Any],
    headers: dict[str, str] | None = None,
) -> bytes:
    """GET *url* and return the raw body bytes.

    Retries once (when ``source.retries`` is 1) on connection errors and
    server errors; client errors fail immediately.
    """
    attempts = 1 + source.retries
    last: FetchError | None = None
    for attempt in range(1, attempts + 1):
        logger.debug("GET %s %s (attempt %d/%d)", url, _loggable(params), attempt, attempts)
        try:
            resp = requests.get(url, params=params, headers=headers, timeout=source.timeout)
        except requests.RequestException as exc:
            last = FetchError(f"request to {url} failed: {exc.__class__.__name__}", source.name)
            continue
        if resp.status_code >= 500:
            last = FetchError(f"HTTP {resp.status_code} from {url}", source.name, resp.status_code)
            continue
        if resp.status_code >= 400:
            raise FetchError(f"HTTP {resp.status_code} from {url}", source.name, resp.status_code)
        return resp.content
    assert last is not None
    logger.warning("%s: giving up after %d attempt(s)", source.name, attempts)
    raise last

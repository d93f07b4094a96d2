"""Recorded payloads: replay them offline, or capture live ones for later.

Fixture mode is the default in tests. A fixture is the exact byte payload an
endpoint returned, so a fetch in fixture mode runs the same parser as a live
fetch and is fully deterministic.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from wxreport.errors import (
    FixtureNotFoundError,
    FixtureReadError,
    InvalidInputError,
    OutputError,
    PayloadSchemaError,
)

logger = logging.getLogger(__name__)


def load_fixture(path: str | Path, source: str | None = None) -> bytes:
    """Return the exact recorded bytes at *path*.

    Raises:
        FixtureNotFoundError: nothing exists at *path*.
        InvalidInputError: *path* is a directory (or not a regular file).
        FixtureReadError: the file exists but cannot be read.
    """
    p = Path(path)
    if not p.exists():
        raise FixtureNotFoundError(f"fixture not found: {p}", source)
    if not p.is_file():
        raise InvalidInputError(f"fixture path is not a file: {p}", source)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise FixtureReadError(f"cannot read fixture {p}: {exc.strerror or exc}", source) from None
    logger.debug("loaded fixture %s (%d bytes)", p, len(data))
    return data


def save_payload(raw: bytes, path: str | Path) -> Path:
    """Persist a raw payload so it can be replayed as a fixture later."""
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_bytes(raw)
    except OSError as exc:
        raise OutputError(f"cannot write payload {p}: {exc.strerror or exc}") from None
    logger.info("captured %d bytes -> %s", len(raw), p)
    return p


def decode_json(raw: bytes, source: str | None = None) -> Any:
    """Decode a JSON payload, classifying failures as schema errors."""
    try:
        return json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise PayloadSchemaError(f"payload is not valid JSON: {exc}", source) from None

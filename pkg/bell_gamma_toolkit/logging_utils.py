"""Structured logging setup and safe payload serialization.

Public helpers
- ``StructuredFormatter``
    Formats records as ``time="..." level=info module=... msg="..."`` lines,
    one per record, with quotes escaped and newlines collapsed.

- ``setup_logging(level)``
    Installs a single stderr handler with ``StructuredFormatter`` on the
    package logger. Reports go to stdout, so diagnostics must stay on
    stderr to keep machine-readable output byte-stable.

- ``safe_serialize_payload(payload, *, max_len=4096) -> str``
    Compact JSON of a configuration or result payload for DEBUG logs,
    with control characters removed and long output truncated.

- ``safe_log_payload(name, payload, logger, *, level=logging.DEBUG)``
    Convenience wrapper around ``safe_serialize_payload``.
"""

from __future__ import annotations

import json
import logging
import re
import sys
from datetime import UTC, datetime
from typing import TextIO

from pydantic import BaseModel

PACKAGE_LOGGER = "bell_gamma_toolkit"

# Remove ASCII control characters (0x00-0x1F and DEL 0x7F).
_CONTROL_RE = re.compile(r"[\x00-\x1f\x7f]+")


class StructuredFormatter(logging.Formatter):
    """Format logs as key=value lines: time=... level=... module=... msg=..."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as a single structured line."""
        # ISO 8601 format with Z suffix (UTC)
        timestamp = (
            datetime.fromtimestamp(record.created, tz=UTC)
            .isoformat(timespec="seconds")
            .replace("+00:00", "Z")
        )

        level = record.levelname.lower()
        module = record.name if record.name != "root" else record.funcName or "app"

        safe_msg = str(record.getMessage()).replace('"', '\\"').replace("\n", "\\n")

        log_parts = [
            f'time="{timestamp}"',
            f"level={level}",
            f"module={module}",
            f'msg="{safe_msg}"',
        ]
        if record.exc_info:
            exc_text = self.formatException(record.exc_info)
            safe_exc = exc_text.replace('"', '\\"').replace("\n", "\\n")
            log_parts.append(f'exc="{safe_exc}"')

        return " ".join(log_parts)


def setup_logging(level: int | str = logging.WARNING, stream: TextIO | None = None) -> None:
    """Set up structured logging for the package on stderr.

    Args:
        level: Logging level (name or number)
        stream: Destination stream, stderr when omitted
    """
    pkg_logger = logging.getLogger(PACKAGE_LOGGER)
    pkg_logger.setLevel(level)

    # Remove any handlers left by a previous invocation
    pkg_logger.handlers.clear()

    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(StructuredFormatter())
    pkg_logger.addHandler(handler)
    pkg_logger.propagate = False


def _to_jsonable(payload: object) -> object:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, list | tuple):
        return [_to_jsonable(v) for v in payload]
    if isinstance(payload, dict):
        return {str(k): _to_jsonable(v) for k, v in payload.items()}
    return payload


def safe_serialize_payload(payload: object, *, max_len: int = 4096) -> str:
    """Serialize a payload (typically a pydantic model) for logging.

    - Pydantic models are dumped in JSON mode.
    - Truncates the resulting JSON string to max_len.
    - Removes control characters.
    """
    try:
        s = json.dumps(_to_jsonable(payload), separators=(",", ":"), ensure_ascii=False)
    except (TypeError, ValueError):
        s = str(payload)

    s = _CONTROL_RE.sub("", s)
    if len(s) > max_len:
        return s[:max_len] + "...(truncated)"
    return s


def safe_log_payload(
    name: str, payload: object, logger: logging.Logger, *, level: int = logging.DEBUG
) -> None:
    if not logger.isEnabledFor(level):
        return
    logger.log(level, "[PAYLOAD] %s: %s", name, safe_serialize_payload(payload))

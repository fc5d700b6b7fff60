"""Atomic file writes used by every command output."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any

logger = logging.getLogger('depts.fileio')


def atomic_write_bytes(path: str | os.PathLike, data: bytes) -> Path:
    """Write bytes to a temporary sibling and move it into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f'.{target.name}.', dir=target.parent)
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    logger.debug(f"Wrote {len(data)} bytes to {target}")
    return target


def atomic_write_text(path: str | os.PathLike, text: str) -> Path:
    """Write UTF-8 text atomically."""
    return atomic_write_bytes(path, text.encode('utf-8'))


def atomic_write_json(path: str | os.PathLike, document: Any) -> Path:
    """Write a JSON document atomically with stable key order."""
    return atomic_write_text(path, json.dumps(document, indent=2, sort_keys=True) + '\n')


def read_json(path: str | os.PathLike) -> Any:
    """Read a JSON document."""
    with open(path, encoding='utf-8') as f:
        return json.load(f)

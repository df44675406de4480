"""Canonical JSON serialization shared by every persisted or emitted object."""

from __future__ import annotations

import hashlib
import json
from typing import Any


def dumps(obj: Any) -> str:
    """Sorted keys, no insignificant whitespace, one trailing newline.

    Floats go through ``repr`` so they round-trip exactly; NaN/inf are rejected.
    """
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ) + "\n"


def dump_bytes(obj: Any) -> bytes:
    return dumps(obj).encode("utf-8")


def digest(obj: Any) -> str:
    return hashlib.sha256(dump_bytes(obj)).hexdigest()

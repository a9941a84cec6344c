"""Deterministic JSON form and content digests.

Everything persisted or diffed in this package goes through these helpers so
that identical logical content always yields identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(obj: Any) -> str:
    """Return canonical JSON: sorted keys, no insignificant whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_obj(obj: Any) -> str:
    """SHA-256 hex digest of the canonical JSON bytes of ``obj``."""
    return sha256_hex(canonical_bytes(obj))


def digest_text(text: str) -> str:
    return sha256_hex(text.encode("utf-8"))

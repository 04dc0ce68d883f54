"""Fixture store for stub mode: responses keyed by request hash.

A fixture file holds one exact JSON response body. Lookup tries the
sha256 of the canonical request encoding first, then the endpoint's
default.json, so recorded requests replay their recorded answer while
novel-but-valid requests still get a deterministic one. No default file,
no match: the caller gets a miss.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

ENDPOINTS = ("interpret", "genmesh", "act")


def canonical_request_bytes(payload: dict) -> bytes:
    """Key encoding: sorted keys, no whitespace, raw unicode."""
    return json.dumps(
        payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def request_key(payload: dict) -> str:
    return hashlib.sha256(canonical_request_bytes(payload)).hexdigest()


class FixtureStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        if not self.root.is_dir():
            raise ValueError(f"fixture directory {self.root} does not exist")

    def lookup(self, endpoint: str, payload: dict) -> dict | None:
        if endpoint not in ENDPOINTS:
            raise ValueError(f"unknown endpoint {endpoint!r}; expected one of {ENDPOINTS}")
        for name in (f"{request_key(payload)}.json", "default.json"):
            path = self.root / endpoint / name
            if path.is_file():
                return json.loads(path.read_text(encoding="utf-8"))
        return None

    def save(self, endpoint: str, payload: dict | None, response: dict) -> Path:
        """Record a fixture; payload None writes the endpoint default."""
        if endpoint not in ENDPOINTS:
            raise ValueError(f"unknown endpoint {endpoint!r}; expected one of {ENDPOINTS}")
        name = "default.json" if payload is None else f"{request_key(payload)}.json"
        path = self.root / endpoint / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(response, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return path

"""Content-addressed store for rendered reports.

An entry is the sha256 digest of its payload on the first line followed by
the payload bytes.  Entries are written to a temporary file and renamed into
place, so a reader never sees a partial entry.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

CACHE_ENV = "TWISTORCOUNT_CACHE"


def config_key(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


class ResultCache:
    def __init__(self, root: str | os.PathLike) -> None:
        self.root = Path(root)

    @classmethod
    def from_env(cls, root: str | os.PathLike | None = None) -> "ResultCache | None":
        root = root or os.environ.get(CACHE_ENV)
        return cls(root) if root else None

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.entry"

    def put(self, key: str, payload: bytes) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        digest = hashlib.sha256(payload).hexdigest().encode()
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(digest + b"\n" + payload)
            os.replace(tmp, self._path(key))
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise

    def get(self, key: str) -> bytes | None:
        path = self._path(key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            return None
        digest, sep, payload = raw.partition(b"\n")
        if not sep or hashlib.sha256(payload).hexdigest().encode() != digest:
            log.warning("evicting corrupt cache entry %s", path.name)
            path.unlink(missing_ok=True)
            return None
        return payload

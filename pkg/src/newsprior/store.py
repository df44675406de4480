"""File-backed, versioned profile store.

Layout::

    <root>/snapshots/0000000001.json   one immutable file per published snapshot
    <root>/CURRENT                     id of the latest published snapshot
    <root>/verdicts/<sha256>.json      recorded claim verdicts

Publishing writes the snapshot to a temp file, fsyncs, renames it into place,
then swaps CURRENT the same way. A crash at any point leaves CURRENT naming a
complete snapshot.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from . import canonical
from .errors import StoreCorruptError, StoreError
from .verdict import ClaimVerdict, MediaProfile

SNAPSHOT_FORMAT = "newsprior-snapshot"
SNAPSHOT_FORMAT_VERSION = 1
_ID_WIDTH = 10


@dataclass(frozen=True)
class ProfileSnapshot:
    profiles: Mapping[str, MediaProfile] = field(default_factory=dict)
    snapshot_id: int = 0
    created_at: int = 0

    def to_dict(self) -> dict:
        return {"format": SNAPSHOT_FORMAT, "format_version": SNAPSHOT_FORMAT_VERSION,
                "snapshot_id": self.snapshot_id, "created_at": self.created_at,
                "profiles": {d: p.to_dict() for d, p in sorted(self.profiles.items())}}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ProfileSnapshot":
        if d.get("format") != SNAPSHOT_FORMAT or d.get("format_version") != SNAPSHOT_FORMAT_VERSION:
            raise ValueError("not a version-1 snapshot")
        return cls({k: MediaProfile.from_dict(v) for k, v in d["profiles"].items()},
                   int(d["snapshot_id"]), int(d["created_at"]))


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    try:
        dfd = os.open(path.parent, os.O_RDONLY)
    except OSError:
        return
    try:
        os.fsync(dfd)
    finally:
        os.close(dfd)


def snapshot_path(root: str | Path, snapshot_id: int) -> Path:
    return Path(root) / "snapshots" / f"{snapshot_id:0{_ID_WIDTH}d}.json"


def read_snapshot(root: str | Path, snapshot_id: int) -> ProfileSnapshot:
    path = snapshot_path(root, snapshot_id)
    try:
        data = json.loads(path.read_text("utf-8"))
        snap = ProfileSnapshot.from_dict(data)
    except FileNotFoundError:
        raise StoreCorruptError(path, "missing") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise StoreCorruptError(path, str(exc) or type(exc).__name__) from None
    if snap.snapshot_id != snapshot_id:
        raise StoreCorruptError(path, f"holds snapshot {snap.snapshot_id}")
    return snap


class ProfileStore:
    """Single writer, many readers.

    Readers get the current :class:`ProfileSnapshot` object, which is never
    mutated; a publish swaps the reference under a lock.
    """

    def __init__(self, root: str | Path, clock: Callable[[], float] = time.time,
                 _snapshot: ProfileSnapshot | None = None):
        self.root = Path(root)
        self.clock = clock
        self._snapshot = _snapshot or ProfileSnapshot()
        self._write_lock = threading.Lock()

    @classmethod
    def load(cls, root: str | Path, clock: Callable[[], float] = time.time) -> "ProfileStore":
        root = Path(root)
        (root / "snapshots").mkdir(parents=True, exist_ok=True)
        current = root / "CURRENT"
        if not current.exists():
            return cls(root, clock)
        text = current.read_text("utf-8").strip()
        try:
            snapshot_id = int(text)
        except ValueError:
            raise StoreCorruptError(current, f"bad pointer {text!r}") from None
        snap = read_snapshot(root, snapshot_id) if snapshot_id else ProfileSnapshot()
        return cls(root, clock, snap)

    def get_snapshot(self) -> ProfileSnapshot:
        return self._snapshot

    def get_profile(self, domain: str) -> MediaProfile | None:
        return self._snapshot.profiles.get(domain)

    def put_profile(self, profile: MediaProfile) -> int:
        return self.put_profiles([profile])

    def put_profiles(self, profiles: Iterable[MediaProfile]) -> int:
        """Publish one new snapshot containing ``profiles``; returns its id.

        A profile's version is bumped only when its content (timestamps and
        version excluded) differs from the stored one.
        """
        with self._write_lock:
            prev = self._snapshot
            table = dict(prev.profiles)
            for p in profiles:
                old = table.get(p.domain)
                if old is None:
                    version = 1
                elif old.content_key() == p.content_key():
                    version = old.profile_version
                else:
                    version = old.profile_version + 1
                table[p.domain] = p.with_version(version)
            snap = ProfileSnapshot(dict(sorted(table.items())), prev.snapshot_id + 1,
                                   int(self.clock()))
            try:
                (self.root / "snapshots").mkdir(parents=True, exist_ok=True)
                _atomic_write(snapshot_path(self.root, snap.snapshot_id),
                              canonical.dump_bytes(snap.to_dict()))
                _atomic_write(self.root / "CURRENT", f"{snap.snapshot_id}\n".encode())
            except OSError as exc:
                raise StoreError(f"failed to publish snapshot {snap.snapshot_id}: {exc}") from exc
            self._snapshot = snap
            return snap.snapshot_id

    def record_verdict(self, verdict: ClaimVerdict) -> Path:
        body = canonical.dump_bytes(verdict.to_dict())
        path = self.root / "verdicts" / f"{canonical.digest(verdict.to_dict())}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with self._write_lock:
            _atomic_write(path, body)
        return path


def load(root: str | Path, clock: Callable[[], float] = time.time) -> ProfileStore:
    return ProfileStore.load(root, clock)

"""Versioned storage for uploaded data files.

Files live under `<root>/<eo>/<us_id>/<YYYY-MM-DD>/<filename>`; all the
uploads of one secondary unit on one calendar day form one version. The
index file is a convenience cache: rescanning the tree rebuilds it.
"""

from __future__ import annotations

import hashlib
import os
import re
import threading
from dataclasses import dataclass
from datetime import date as Date
from pathlib import Path
from typing import Iterable, Sequence

from .engine import DataFileName, Finding, SUBJECT_FINALITY, parse_filename
from .dictionary import SEVERITY_WARNING
from .errors import (
    EmptyUploadError,
    InvalidRequestError,
    NoVersionsError,
    StorageError,
    UnknownFileError,
    UnknownUsError,
    UsMismatchError,
    VersionOrderError,
)
from .expressions import MISSING

PROVISIONAL = "provisional"
FINAL = "final"

INDEX_NAME = ".index"
MARKER_NAME = ".version"

_US_RE = re.compile(r"^\d{4}$")


@dataclass(frozen=True)
class SecondaryUnit:
    us_id: str
    eo: str
    assigned_controller: str
    target_households: int = 20


@dataclass(frozen=True)
class StoredFile:
    name: str
    digest: str  # sha256 hex of the stored bytes

    def path_under(self, eo: str, us_id: str, date: Date) -> str:
        return f"{eo}/{us_id}/{date.isoformat()}/{self.name}"


@dataclass(frozen=True)
class UsVersion:
    us_id: str
    ordinal: int
    date: Date
    version_type: str
    files: tuple[StoredFile, ...]  # sorted by name

    def file_named(self, name: str) -> StoredFile | None:
        for stored in self.files:
            if stored.name == name:
                return stored
        return None


@dataclass(frozen=True)
class FileHistory:
    filename: str
    first_received: Date
    last_received: Date


def _digest(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def _atomic_write(path: Path, content: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(content)
    os.replace(tmp, path)


class Vault:
    """The version store. All operations on one U.S are serialized."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self._units: dict[str, SecondaryUnit] = {}
        self._versions: dict[str, list[UsVersion]] = {}
        self._eo_of: dict[str, str] = {}
        self._master = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create vault root {self.root}: {exc}") from exc
        if (self.root / INDEX_NAME).exists():
            self._load_index()
        else:
            self.rescan()

    # --- units registry ---------------------------------------------------

    def set_units(self, units: Iterable[SecondaryUnit]) -> None:
        with self._master:
            self._units = {unit.us_id: unit for unit in units}

    def unit(self, us_id: str) -> SecondaryUnit | None:
        return self._units.get(us_id)

    def known_us(self) -> set[str]:
        return set(self._units) | set(self._versions)

    def eo_of(self, us_id: str) -> str | None:
        unit = self._units.get(us_id)
        if unit is not None:
            return unit.eo
        return self._eo_of.get(us_id)

    def _lock_for(self, us_id: str) -> threading.Lock:
        with self._master:
            return self._locks.setdefault(us_id, threading.Lock())

    # --- write path ---------------------------------------------------------

    def store_upload(
        self,
        us: SecondaryUnit,
        date: Date,
        version_type: str,
        files: Sequence[tuple[DataFileName | str, bytes]],
    ) -> UsVersion:
        if version_type not in (PROVISIONAL, FINAL):
            raise InvalidRequestError(
                f"version_type must be {PROVISIONAL} or {FINAL}, got {version_type!r}"
            )
        if not files:
            raise EmptyUploadError("upload contains no files")
        named: list[tuple[DataFileName, bytes]] = []
        for name, content in files:
            parsed = name if isinstance(name, DataFileName) else parse_filename(name)
            if parsed.us_id != us.us_id:
                raise UsMismatchError(
                    f"{parsed.raw} belongs to U.S {parsed.us_id}, not {us.us_id}"
                )
            named.append((parsed, content))

        with self._lock_for(us.us_id):
            versions = self._versions.get(us.us_id, [])
            existing = next((v for v in versions if v.date == date), None)
            if existing is None:
                if versions and date < versions[-1].date:
                    raise VersionOrderError(
                        f"upload dated {date.isoformat()} precedes the latest version "
                        f"({versions[-1].date.isoformat()})"
                    )
                ordinal = len(versions) + 1
            else:
                ordinal = existing.ordinal

            directory = self.root / us.eo / us.us_id / date.isoformat()
            try:
                directory.mkdir(parents=True, exist_ok=True)
                _atomic_write(directory / MARKER_NAME, version_type.encode("ascii"))
                merged: dict[str, StoredFile] = (
                    {f.name: f for f in existing.files} if existing else {}
                )
                for parsed, content in named:
                    _atomic_write(directory / parsed.raw, content)
                    merged[parsed.raw] = StoredFile(parsed.raw, _digest(content))
            except OSError as exc:
                raise StorageError(f"cannot store upload: {exc}") from exc

            version = UsVersion(
                us.us_id, ordinal, date, version_type,
                tuple(sorted(merged.values(), key=lambda f: f.name)),
            )
            if existing is None:
                versions = versions + [version]
            else:
                versions = [version if v.date == date else v for v in versions]
            with self._master:
                self._versions[us.us_id] = versions
                self._eo_of[us.us_id] = us.eo
                self._persist_index()
            return version

    # --- read path ----------------------------------------------------------

    def _known(self, us_id: str) -> None:
        if us_id not in self._units and us_id not in self._versions:
            raise UnknownUsError(f"unknown U.S {us_id}")

    def list_versions(self, us_id: str) -> list[UsVersion]:
        self._known(us_id)
        return list(self._versions.get(us_id, []))

    def latest_version(self, us_id: str) -> UsVersion:
        self._known(us_id)
        versions = self._versions.get(us_id)
        if not versions:
            raise NoVersionsError(f"U.S {us_id} has no uploads yet")
        return versions[-1]

    def file_history(self, us_id: str, filename: str) -> FileHistory:
        self._known(us_id)
        dates = [
            version.date
            for version in self._versions.get(us_id, [])
            if version.file_named(filename) is not None
        ]
        if not dates:
            raise UnknownFileError(f"{filename} was never uploaded for U.S {us_id}")
        return FileHistory(filename, min(dates), max(dates))

    def read_file(self, us_id: str, version: UsVersion, name: str) -> bytes:
        stored = version.file_named(name)
        if stored is None:
            raise UnknownFileError(f"{name} is not part of this version")
        eo = self.eo_of(us_id)
        path = self.root / stored.path_under(eo, us_id, version.date)
        try:
            content = path.read_bytes()
        except OSError as exc:
            raise StorageError(f"cannot read {path}: {exc}") from exc
        if _digest(content) != stored.digest:
            raise StorageError(f"{name}: stored content does not match its digest")
        return content

    def version_contents(self, us_id: str, version: UsVersion) -> list[tuple[str, bytes]]:
        return [(f.name, self.read_file(us_id, version, f.name)) for f in version.files]

    # --- finality ------------------------------------------------------------

    def finality_check(self, us: SecondaryUnit, version: UsVersion, decoded) -> Finding | None:
        """Warn when a version declared final covers too few households."""
        if version.version_type != FINAL:
            return None
        households = set()
        for decoded_file in decoded:
            for record in decoded_file.records:
                key_field = record.spec.household_key
                if key_field is None:
                    continue
                key = record.values.get(key_field)
                if key is not MISSING and key is not None:
                    households.add(key)
        if len(households) >= us.target_households:
            return None
        return Finding(
            us.us_id,
            1,
            SUBJECT_FINALITY,
            SEVERITY_WARNING,
            f"declared final with {len(households)}/{us.target_households} households",
        )

    # --- index and recovery ---------------------------------------------------

    def _index_lines(self) -> list[str]:
        lines = []
        for us_id in sorted(self._versions):
            eo = self._eo_of[us_id]
            for version in self._versions[us_id]:
                files = ",".join(f"{f.name}:{f.digest}" for f in version.files)
                lines.append(
                    f"{eo}|{us_id}|{version.ordinal}|{version.date.isoformat()}"
                    f"|{version.version_type}|{files}"
                )
        return lines

    def _persist_index(self) -> None:
        content = "".join(line + "\n" for line in self._index_lines())
        try:
            _atomic_write(self.root / INDEX_NAME, content.encode("ascii"))
        except OSError as exc:
            raise StorageError(f"cannot write vault index: {exc}") from exc

    def _load_index(self) -> None:
        path = self.root / INDEX_NAME
        versions: dict[str, list[UsVersion]] = {}
        eo_of: dict[str, str] = {}
        for number, line in enumerate(path.read_text("ascii").splitlines(), start=1):
            try:
                eo, us_id, ordinal, date_text, version_type, files_text = line.split("|")
                files = []
                if files_text:
                    for chunk in files_text.split(","):
                        name, digest = chunk.rsplit(":", 1)
                        files.append(StoredFile(name, digest))
                version = UsVersion(
                    us_id, int(ordinal), Date.fromisoformat(date_text),
                    version_type, tuple(files),
                )
            except ValueError as exc:
                raise StorageError(f"vault index line {number} corrupted: {exc}") from exc
            versions.setdefault(us_id, []).append(version)
            eo_of[us_id] = eo
        for ordered in versions.values():
            ordered.sort(key=lambda v: v.ordinal)
        self._versions = versions
        self._eo_of = eo_of

    def rescan(self) -> None:
        """Rebuild the version index from the directory tree alone."""
        versions: dict[str, list[UsVersion]] = {}
        eo_of: dict[str, str] = {}
        for eo_dir in sorted(self.root.iterdir()) if self.root.exists() else []:
            if not eo_dir.is_dir() or eo_dir.name.startswith("."):
                continue
            for us_dir in sorted(eo_dir.iterdir()):
                if not us_dir.is_dir() or not _US_RE.match(us_dir.name):
                    continue
                dated = []
                for date_dir in sorted(us_dir.iterdir()):
                    if not date_dir.is_dir():
                        continue
                    try:
                        date = Date.fromisoformat(date_dir.name)
                    except ValueError:
                        continue
                    marker = date_dir / MARKER_NAME
                    version_type = (
                        marker.read_text("ascii").strip() if marker.exists() else PROVISIONAL
                    )
                    files = tuple(
                        StoredFile(entry.name, _digest(entry.read_bytes()))
                        for entry in sorted(date_dir.iterdir())
                        if entry.is_file() and not entry.name.startswith(".")
                    )
                    dated.append((date, version_type, files))
                dated.sort(key=lambda item: item[0])
                if dated:
                    versions[us_dir.name] = [
                        UsVersion(us_dir.name, ordinal, date, version_type, files)
                        for ordinal, (date, version_type, files) in enumerate(dated, start=1)
                    ]
                    eo_of[us_dir.name] = eo_dir.name
        with self._master:
            self._versions = versions
            self._eo_of = eo_of
            self._persist_index()

"""Pursuit report rows and on-demand secondary-unit control."""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass
from datetime import date as Date
from datetime import datetime
from pathlib import Path

from .accounts import AccountStore, Session
from .dictionary import DataDictionary, Rule
from .engine import ErrorListing, decode_file, run_control, with_extra_findings
from .errors import (
    InvalidFilterError,
    UnauthorizedError,
    UnknownListingError,
    UnknownUsError,
)
from .vault import FINAL, FileHistory, PROVISIONAL, Vault

PLACEHOLDER = "-----"
SLOTS = 6

TYPE_LABELS = {PROVISIONAL: "Provisional", FINAL: "Final"}


def report_date(date: Date) -> str:
    return date.strftime("%d-%m-%Y")


@dataclass(frozen=True)
class ReportFilter:
    eo: str | None = None
    us_id: str | None = None
    version_type: str | None = None
    date_from: Date | None = None
    date_to: Date | None = None

    def __post_init__(self):
        if self.version_type is not None and self.version_type not in TYPE_LABELS:
            raise InvalidFilterError(
                f"version_type must be {PROVISIONAL} or {FINAL}, got {self.version_type!r}"
            )
        if (
            self.date_from is not None
            and self.date_to is not None
            and self.date_from > self.date_to
        ):
            raise InvalidFilterError("date_from is after date_to")


@dataclass(frozen=True)
class PursuitRow:
    eo: str
    us_id: str
    files: tuple[str, ...]  # latest version's files
    version_type: str | None  # display label, None before the first upload
    version_dates: tuple[str, ...]  # exactly SLOTS cells, DD-MM-YYYY or PLACEHOLDER
    extra_versions: int  # versions beyond the displayed slots


@dataclass(frozen=True)
class PursuitReport:
    rows: tuple[PursuitRow, ...]
    generated_at: datetime
    role: str
    username: str


def _row_for(eo: str, us_id: str, versions) -> PursuitRow:
    dates = [report_date(v.date) for v in versions[:SLOTS]]
    dates += [PLACEHOLDER] * (SLOTS - len(dates))
    latest = versions[-1] if versions else None
    return PursuitRow(
        eo,
        us_id,
        tuple(f.name for f in latest.files) if latest else (),
        TYPE_LABELS[latest.version_type] if latest else None,
        tuple(dates),
        max(0, len(versions) - SLOTS),
    )


def pursuit_report(
    session: Session,
    store: AccountStore,
    vault: Vault,
    filter: ReportFilter,
    generated_at: datetime,
) -> PursuitReport:
    units = {unit.us_id: unit for unit in store.units()}
    visible = store.visible_us(session)
    rows = []
    for us_id in sorted(visible):
        unit = units[us_id]
        if filter.eo is not None and unit.eo != filter.eo:
            continue
        if filter.us_id is not None and us_id != filter.us_id:
            continue
        versions = vault.list_versions(us_id)
        if filter.version_type is not None:
            if not versions or versions[-1].version_type != filter.version_type:
                continue
        if filter.date_from is not None or filter.date_to is not None:
            low = filter.date_from or Date.min
            high = filter.date_to or Date.max
            if not any(low <= v.date <= high for v in versions):
                continue
        rows.append(_row_for(unit.eo, us_id, versions))
    rows.sort(key=lambda row: (row.eo, row.us_id))
    return PursuitReport(tuple(rows), generated_at, session.role, session.username)


def report_payload(report: PursuitReport) -> dict:
    return {
        "generated_at": report.generated_at.isoformat(),
        "role": report.role,
        "username": report.username,
        "rows": [
            {
                "eo": row.eo,
                "us_id": row.us_id,
                "files": list(row.files),
                "version_type": row.version_type,
                "version_dates": list(row.version_dates),
                "extra_versions": row.extra_versions,
            }
            for row in report.rows
        ],
    }


class ListingStore:
    """Persisted control listings, re-fetchable by generated id."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def save(self, listing: ErrorListing, us_id: str) -> str:
        listing_id = uuid.uuid4().hex
        payload = {"id": listing_id, "us_id": us_id, "listing": listing.to_payload()}
        (self.directory / f"{listing_id}.json").write_text(
            json.dumps(payload, indent=2), "utf-8"
        )
        (self.directory / f"{listing_id}.txt").write_text(listing.to_text(), "ascii")
        return listing_id

    def get(self, listing_id: str) -> tuple[str, dict, str]:
        """Returns (us_id, json payload, exact text)."""
        json_path = self.directory / f"{listing_id}.json"
        if not listing_id.isalnum() or not json_path.exists():
            raise UnknownListingError(f"no listing {listing_id!r}")
        payload = json.loads(json_path.read_text("utf-8"))
        text = (self.directory / f"{listing_id}.txt").read_text("ascii")
        return payload["us_id"], payload["listing"], text


@dataclass(frozen=True)
class ControlResult:
    listing: ErrorListing
    histories: tuple[FileHistory, ...]
    listing_id: str


def control_us(
    session: Session,
    store: AccountStore,
    vault: Vault,
    dictionary: DataDictionary,
    rules: list[Rule],
    us_id: str,
    produced_at: datetime,
    listings: ListingStore,
) -> ControlResult:
    """Run complete control over the latest version of one secondary unit."""
    if us_id not in vault.known_us():
        raise UnknownUsError(f"unknown U.S {us_id}")
    if us_id not in store.visible_us(session):
        raise UnauthorizedError(f"U.S {us_id} is outside your scope")
    version = vault.latest_version(us_id)
    contents = vault.version_contents(us_id, version)
    listing = run_control(dictionary, rules, contents, produced_at)
    unit = vault.unit(us_id)
    if unit is not None:
        decoded = [decode_file(dictionary, data, name) for name, data in contents]
        finding = vault.finality_check(unit, version, decoded)
        if finding is not None:
            listing = with_extra_findings(listing, [finding])
    histories = tuple(vault.file_history(us_id, f.name) for f in version.files)
    listing_id = listings.save(listing, us_id)
    return ControlResult(listing, histories, listing_id)


def control_payload(result: ControlResult) -> dict:
    return {
        "listing_id": result.listing_id,
        "listing": result.listing.to_payload(),
        "files": [
            {
                "filename": h.filename,
                "first_received": h.first_received.isoformat(),
                "last_received": h.last_received.isoformat(),
            }
            for h in result.histories
        ],
    }

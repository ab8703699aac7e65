"""Accounts, sessions, the controller roster and credential flows.

Three roles: administrators run the platform, one supervisor per
engineering office creates that office's controller accounts, and
controllers upload data for their assigned secondary units.
"""

from __future__ import annotations

import csv
import hashlib
import hmac
import io
import json
import os
import re
import secrets
import string
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable

from .clock import Clock
from .errors import (
    AlreadyInitializedError,
    BadCredentialsError,
    DuplicateAccountError,
    DuplicateSupervisorError,
    ForeignEoError,
    InvalidEmailError,
    RosterImportError,
    UnauthorizedError,
    UnknownCodeError,
    UnknownEoError,
    UnknownSessionError,
    WeakPasswordError,
)
from .notify import Notifier
from .vault import SecondaryUnit

ROLE_ADMINISTRATOR = "administrator"
ROLE_SUPERVISOR = "supervisor"
ROLE_CONTROLLER = "controller"
ROLES = (ROLE_ADMINISTRATOR, ROLE_SUPERVISOR, ROLE_CONTROLLER)

PASSWORD_ALPHABET = string.ascii_letters + string.digits
PASSWORD_LENGTH = 12
MIN_PASSWORD_LENGTH = 8

_PBKDF2_ITERATIONS = 60_000
_US_ID_RE = re.compile(r"^\d{4}$")

ROSTER_HEADER = ["code", "name", "surname", "eo", "assigned_us"]


def random_password(length: int = PASSWORD_LENGTH) -> str:
    return "".join(secrets.choice(PASSWORD_ALPHABET) for _ in range(length))


def hash_password(password: str) -> str:
    salt = secrets.token_hex(16)
    digest = hashlib.pbkdf2_hmac(
        "sha256", password.encode("utf-8"), salt.encode("ascii"), _PBKDF2_ITERATIONS
    ).hex()
    return f"pbkdf2-sha256-{_PBKDF2_ITERATIONS}${salt}${digest}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, salt, digest = stored.split("$")
        iterations = int(scheme.rsplit("-", 1)[1])
    except (ValueError, IndexError):
        return False
    candidate = hashlib.pbkdf2_hmac(
        "sha256", password.encode("utf-8"), salt.encode("ascii"), iterations
    ).hex()
    return hmac.compare_digest(candidate, digest)


_DUMMY_DIGEST = hash_password("timing-padding")


@dataclass
class UserAccount:
    username: str
    display_name: str
    email: str
    role: str
    password_digest: str
    eo: str | None = None
    controller_code: str | None = None


@dataclass(frozen=True)
class Session:
    token: str
    username: str
    role: str
    created_at: datetime
    expires_at: datetime
    eo: str | None = None
    controller_code: str | None = None


@dataclass(frozen=True)
class RosterEntry:
    code: str
    name: str
    surname: str
    eo: str
    assigned_us: tuple[str, ...]


def parse_roster(text: str, known_us: set[str] | None = None) -> list[RosterEntry]:
    """Parse the roster CSV; known_us, when given, bounds assigned_us."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        return []
    if rows[0] != ROSTER_HEADER:
        raise RosterImportError(f"header must be {','.join(ROSTER_HEADER)}", 1)
    entries: list[RosterEntry] = []
    seen_codes: dict[str, int] = {}
    claimed_us: dict[str, str] = {}
    for number, row in enumerate(rows[1:], start=2):
        if not row or row == [""]:
            continue
        if len(row) != 5:
            raise RosterImportError(f"expected 5 columns, got {len(row)}", number)
        code, name, surname, eo, us_text = (cell.strip() for cell in row)
        if not code:
            raise RosterImportError("empty controller code", number)
        if code in seen_codes:
            raise RosterImportError(
                f"duplicate code {code} (first on line {seen_codes[code]})", number
            )
        seen_codes[code] = number
        if not surname or not eo:
            raise RosterImportError("surname and eo are required", number)
        assigned = tuple(part for part in us_text.split(";") if part)
        for us_id in assigned:
            if not _US_ID_RE.match(us_id):
                raise RosterImportError(f"bad U.S id {us_id!r}", number)
            if known_us is not None and us_id not in known_us:
                raise RosterImportError(f"reference to unknown U.S {us_id}", number)
            if us_id in claimed_us:
                raise RosterImportError(
                    f"U.S {us_id} already assigned to controller {claimed_us[us_id]}",
                    number,
                )
            claimed_us[us_id] = code
        entries.append(RosterEntry(code, name, surname, eo, assigned))
    return entries


class AccountStore:
    """Accounts and the roster persist as JSON; sessions are in-memory."""

    def __init__(
        self,
        path: Path | str,
        notifier: Notifier,
        clock: Clock,
        session_ttl: timedelta = timedelta(hours=8),
    ):
        self.path = Path(path)
        self.notifier = notifier
        self.clock = clock
        self.session_ttl = session_ttl
        self.accounts: dict[str, UserAccount] = {}
        self.roster: list[RosterEntry] = []
        self._sessions: dict[str, Session] = {}  # keyed by sha256(token)
        self._lock = threading.RLock()
        if self.path.exists():
            self._load()

    # --- persistence -------------------------------------------------------

    def _load(self) -> None:
        data = json.loads(self.path.read_text("utf-8"))
        self.accounts = {
            item["username"]: UserAccount(**item) for item in data.get("accounts", [])
        }
        self.roster = [
            RosterEntry(
                item["code"], item["name"], item["surname"], item["eo"],
                tuple(item["assigned_us"]),
            )
            for item in data.get("roster", [])
        ]

    def _persist(self) -> None:
        data = {
            "accounts": [vars(account) for account in self.accounts.values()],
            "roster": [
                {
                    "code": entry.code,
                    "name": entry.name,
                    "surname": entry.surname,
                    "eo": entry.eo,
                    "assigned_us": list(entry.assigned_us),
                }
                for entry in self.roster
            ],
        }
        tmp = self.path.with_name(self.path.name + ".tmp")
        tmp.write_text(json.dumps(data, indent=2, sort_keys=True), "utf-8")
        os.replace(tmp, self.path)

    # --- bootstrap -----------------------------------------------------------

    def bootstrap_admin(self, username: str, email: str) -> tuple[UserAccount, str]:
        with self._lock:
            if any(a.role == ROLE_ADMINISTRATOR for a in self.accounts.values()):
                raise AlreadyInitializedError("an administrator already exists")
            if "@" not in email:
                raise InvalidEmailError(f"email {email!r} has no @")
            password = random_password()
            account = UserAccount(
                username, username, email, ROLE_ADMINISTRATOR, hash_password(password)
            )
            self.accounts[username] = account
            self._persist()
            return account, password

    # --- sessions --------------------------------------------------------------

    @staticmethod
    def _token_key(token: str) -> str:
        return hashlib.sha256(token.encode("utf-8")).hexdigest()

    def authenticate(self, username: str, password: str, role: str) -> Session:
        with self._lock:
            account = self.accounts.get(username)
            if account is None:
                # same hashing cost whether or not the account exists
                verify_password(password, _DUMMY_DIGEST)
                raise BadCredentialsError("bad credentials")
            if not verify_password(password, account.password_digest) or account.role != role:
                raise BadCredentialsError("bad credentials")
            now = self.clock.now()
            token = secrets.token_hex(32)
            session = Session(
                token, username, account.role, now, now + self.session_ttl,
                account.eo, account.controller_code,
            )
            self._sessions[self._token_key(token)] = session
            return session

    def session_for(self, token: str) -> Session:
        with self._lock:
            session = self._sessions.get(self._token_key(token))
            if session is None:
                raise UnknownSessionError("no such session")
            if self.clock.now() >= session.expires_at:
                del self._sessions[self._token_key(token)]
                raise UnknownSessionError("session expired")
            return session

    def logout(self, token: str) -> None:
        with self._lock:
            self.session_for(token)
            del self._sessions[self._token_key(token)]

    # --- account creation chains ------------------------------------------------

    def _generate_username(self, eo: str, surname: str) -> str:
        stem = re.sub(r"[^a-z0-9]", "", surname.lower()) or "user"
        base = f"{eo[0].lower()}.{stem}"
        username = base
        suffix = 2
        while username in self.accounts:
            username = f"{base}{suffix}"
            suffix += 1
        return username

    def _credentials_message(self, account: UserAccount, password: str) -> str:
        return (
            f"Hello {account.display_name},\n"
            f"\n"
            f"username: {account.username}\n"
            f"password: {password}\n"
            f"role: {account.role}\n"
        )

    def roster_eos(self) -> set[str]:
        return {entry.eo for entry in self.roster}

    def create_supervisor(self, session: Session, display_name: str,
                          email: str, eo: str) -> UserAccount:
        with self._lock:
            if session.role != ROLE_ADMINISTRATOR:
                raise UnauthorizedError("only administrators create supervisors")
            if eo not in self.roster_eos():
                raise UnknownEoError(f"unknown engineering office {eo!r}")
            for account in self.accounts.values():
                if account.role == ROLE_SUPERVISOR and account.eo == eo:
                    raise DuplicateSupervisorError(f"{eo} already has a supervisor")
            if "@" not in email:
                raise InvalidEmailError(f"email {email!r} has no @")
            surname = display_name.split()[-1] if display_name.split() else display_name
            username = self._generate_username(eo, surname)
            password = random_password()
            account = UserAccount(
                username, display_name, email, ROLE_SUPERVISOR,
                hash_password(password), eo=eo,
            )
            self.accounts[username] = account
            self._persist()
            self.notifier.send(email, "Your supervisor account",
                               self._credentials_message(account, password))
            return account

    def lookup_controller(self, session: Session, code: str) -> RosterEntry:
        with self._lock:
            if session.role != ROLE_SUPERVISOR:
                raise UnauthorizedError("only supervisors create controllers")
            entry = next((e for e in self.roster if e.code == code), None)
            if entry is None:
                raise UnknownCodeError(f"no controller with code {code!r}")
            if entry.eo != session.eo:
                raise ForeignEoError(f"code {code} belongs to {entry.eo}, not {session.eo}")
            return entry

    def create_controller(self, session: Session, code: str, email: str) -> UserAccount:
        with self._lock:
            entry = self.lookup_controller(session, code)
            for account in self.accounts.values():
                if account.controller_code == code:
                    raise DuplicateAccountError(f"controller {code} already has an account")
            if "@" not in email:
                raise InvalidEmailError(f"email {email!r} has no @")
            username = self._generate_username(entry.eo, entry.surname)
            password = random_password()
            account = UserAccount(
                username, f"{entry.name} {entry.surname}", email, ROLE_CONTROLLER,
                hash_password(password), eo=entry.eo, controller_code=code,
            )
            self.accounts[username] = account
            self._persist()
            self.notifier.send(email, "Your controller account",
                               self._credentials_message(account, password))
            return account

    # --- self-service --------------------------------------------------------------

    def edit_profile(self, session: Session, display_name: str | None = None,
                     email: str | None = None, password: str | None = None) -> UserAccount:
        with self._lock:
            account = self.accounts[session.username]
            if email is not None and "@" not in email:
                raise InvalidEmailError(f"email {email!r} has no @")
            if password is not None and len(password) < MIN_PASSWORD_LENGTH:
                raise WeakPasswordError(
                    f"password must be at least {MIN_PASSWORD_LENGTH} characters"
                )
            if display_name is not None:
                account.display_name = display_name
            if email is not None:
                account.email = email
            if password is not None:
                account.password_digest = hash_password(password)
            self._persist()
            return account

    def reset_password(self, username: str, email: str) -> None:
        """Uniform outcome whether or not the pair matches an account."""
        with self._lock:
            account = self.accounts.get(username)
            if account is None or account.email != email:
                verify_password("padding", _DUMMY_DIGEST)
                return
            password = random_password()
            account.password_digest = hash_password(password)
            self._persist()
            self.notifier.send(email, "Your new password",
                               self._credentials_message(account, password))

    # --- roster and scoping -----------------------------------------------------------

    def import_roster(self, text: str, known_us: set[str] | None = None) -> int:
        entries = parse_roster(text, known_us)
        with self._lock:
            self.roster = entries
            self._persist()
            return len(entries)

    def units(self) -> list[SecondaryUnit]:
        return [
            SecondaryUnit(us_id, entry.eo, entry.code)
            for entry in self.roster
            for us_id in entry.assigned_us
        ]

    def visible_us(self, session: Session) -> set[str]:
        return visible_us(session, self.units())


def visible_us(session: Session, units: Iterable[SecondaryUnit]) -> set[str]:
    """The report/control scope as a pure function of role and identity."""
    if session.role == ROLE_ADMINISTRATOR:
        return {unit.us_id for unit in units}
    if session.role == ROLE_SUPERVISOR:
        return {unit.us_id for unit in units if unit.eo == session.eo}
    return {
        unit.us_id for unit in units
        if unit.assigned_controller == session.controller_code
    }

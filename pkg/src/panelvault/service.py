"""HTTP boundary: the full platform behind an authenticated JSON API.

Every domain error carries a machine code; ERROR_STATUS maps each code to
exactly one HTTP status, and a test asserts the table covers the whole
error vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date as Date
from datetime import timedelta

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .accounts import ROLE_CONTROLLER, AccountStore, Session, UserAccount
from .clock import Clock, parse_clock
from .config import AppConfig
from .dictionary import DataDictionary, Rule, parse_dictionary
from .errors import (
    ConfigError,
    FileTooLargeError,
    InvalidFilterError,
    InvalidRequestError,
    PlatformError,
    TooManyFilesError,
    UnauthorizedError,
    UnknownSessionError,
    UnknownUsError,
)
from .notify import notifier_from_spec
from .reports import (
    ListingStore,
    ReportFilter,
    control_payload,
    control_us,
    pursuit_report,
    report_payload,
)
from .vault import UsVersion, Vault

MAX_FILE_BYTES = 1024 * 1024
MAX_FILES = 64

ERROR_STATUS: dict[str, int] = {
    "internal": 500,
    "bad-credentials": 401,
    "unknown-session": 401,
    "unauthorized": 403,
    "foreign-eo": 403,
    "unknown-eo": 404,
    "unknown-code": 404,
    "unknown-us": 404,
    "unknown-file": 404,
    "unknown-listing": 404,
    "no-versions": 409,
    "duplicate-supervisor": 409,
    "duplicate-account": 409,
    "already-initialized": 409,
    "version-order": 409,
    "invalid-email": 422,
    "weak-password": 422,
    "roster-import": 422,
    "malformed-filename": 422,
    "us-mismatch": 422,
    "empty-upload": 422,
    "invalid-filter": 422,
    "invalid-request": 422,
    "file-too-large": 413,
    "too-many-files": 413,
    "storage-failure": 500,
    "invalid-config": 500,
}

# every endpoint below except the first two requires a bearer token
OPEN_ENDPOINTS = [
    ("POST", "/api/session"),
    ("POST", "/api/password-reset"),
]
PROTECTED_ENDPOINTS = [
    ("DELETE", "/api/session"),
    ("PATCH", "/api/profile"),
    ("POST", "/api/accounts/supervisors"),
    ("GET", "/api/roster/{code}"),
    ("POST", "/api/accounts/controllers"),
    ("POST", "/api/uploads"),
    ("GET", "/api/report"),
    ("POST", "/api/control/{us_id}"),
    ("GET", "/api/listings/{listing_id}"),
]


@dataclass
class AppState:
    config: AppConfig
    store: AccountStore
    vault: Vault
    listings: ListingStore
    dictionary: DataDictionary
    rules: list[Rule]
    clock: Clock
    max_file_bytes: int = MAX_FILE_BYTES
    max_files: int = MAX_FILES


def build_state(config: AppConfig, clock: Clock | None = None) -> AppState:
    root = config.root
    root.mkdir(parents=True, exist_ok=True)
    if clock is None:
        try:
            clock = parse_clock(config.clock) if config.clock else Clock()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    dict_path = config.dictionary or root / "dictionary.txt"
    if not dict_path.exists():
        raise ConfigError(f"no dictionary at {dict_path}; run import-dictionary first")
    dictionary, rules = parse_dictionary(dict_path.read_text("utf-8"))
    notifier = notifier_from_spec(config.notifier or f"outbox:{root / 'outbox'}")
    store = AccountStore(
        root / "accounts.json", notifier, clock, timedelta(seconds=config.session_ttl)
    )
    vault = Vault(root / "vault")
    vault.set_units(store.units())
    listings = ListingStore(root / "listings")
    return AppState(config, store, vault, listings, dictionary, rules, clock)


def _account_payload(account: UserAccount) -> dict:
    return {
        "username": account.username,
        "display_name": account.display_name,
        "email": account.email,
        "role": account.role,
        "eo": account.eo,
        "controller_code": account.controller_code,
    }


def _version_payload(version: UsVersion) -> dict:
    return {
        "us_id": version.us_id,
        "ordinal": version.ordinal,
        "date": version.date.isoformat(),
        "version_type": version.version_type,
        "files": [f.name for f in version.files],
    }


async def _json_body(request: Request) -> dict:
    try:
        data = await request.json()
    except Exception:
        raise InvalidRequestError("request body must be a JSON object") from None
    if not isinstance(data, dict):
        raise InvalidRequestError("request body must be a JSON object")
    return data


def _need(data: dict, key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str) or not value:
        raise InvalidRequestError(f"missing field {key!r}")
    return value


def _optional(data: dict, key: str) -> str | None:
    value = data.get(key)
    if value is not None and not isinstance(value, str):
        raise InvalidRequestError(f"field {key!r} must be a string")
    return value


def _query_date(raw: str | None) -> Date | None:
    if raw is None:
        return None
    try:
        return Date.fromisoformat(raw)
    except ValueError:
        raise InvalidFilterError(f"bad date {raw!r}, expected YYYY-MM-DD") from None


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="panelvault", docs_url=None, redoc_url=None, openapi_url=None)

    def platform_error(request: Request, exc: PlatformError) -> JSONResponse:
        return JSONResponse(
            status_code=ERROR_STATUS[exc.code],
            content={"code": exc.code, "message": exc.message},
        )

    app.add_exception_handler(PlatformError, platform_error)

    def authenticated(request: Request) -> Session:
        header = request.headers.get("authorization", "")
        scheme, _, token = header.partition(" ")
        if scheme.lower() != "bearer" or not token.strip():
            raise UnknownSessionError("missing bearer token")
        return state.store.session_for(token.strip())

    @app.post("/api/session")
    async def login(request: Request):
        data = await _json_body(request)
        session = state.store.authenticate(
            _need(data, "username"), _need(data, "password"), _need(data, "role")
        )
        account = state.store.accounts[session.username]
        return {
            "token": session.token,
            "role": session.role,
            "username": session.username,
            "display_name": account.display_name,
            "eo": session.eo,
        }

    @app.delete("/api/session")
    async def logout(request: Request):
        session = authenticated(request)
        state.store.logout(session.token)
        return {"ok": True}

    @app.post("/api/password-reset")
    async def password_reset(request: Request):
        data = await _json_body(request)
        state.store.reset_password(_need(data, "username"), _need(data, "email"))
        # identical response whether or not the pair matched an account
        return {"ok": True}

    @app.patch("/api/profile")
    async def edit_profile(request: Request):
        session = authenticated(request)
        data = await _json_body(request)
        account = state.store.edit_profile(
            session,
            display_name=_optional(data, "display_name"),
            email=_optional(data, "email"),
            password=_optional(data, "password"),
        )
        return _account_payload(account)

    @app.post("/api/accounts/supervisors")
    async def create_supervisor(request: Request):
        session = authenticated(request)
        data = await _json_body(request)
        account = state.store.create_supervisor(
            session, _need(data, "display_name"), _need(data, "email"), _need(data, "eo")
        )
        return _account_payload(account)

    @app.get("/api/roster/{code}")
    async def roster_lookup(code: str, request: Request):
        session = authenticated(request)
        entry = state.store.lookup_controller(session, code)
        return {
            "code": entry.code,
            "name": entry.name,
            "surname": entry.surname,
            "eo": entry.eo,
            "assigned_us": list(entry.assigned_us),
        }

    @app.post("/api/accounts/controllers")
    async def create_controller(request: Request):
        session = authenticated(request)
        data = await _json_body(request)
        account = state.store.create_controller(
            session, _need(data, "code"), _need(data, "email")
        )
        return _account_payload(account)

    @app.post("/api/uploads")
    async def upload(request: Request):
        session = authenticated(request)
        if session.role != ROLE_CONTROLLER:
            raise UnauthorizedError("only controllers upload data files")
        form = await request.form()
        us_id = form.get("us_id")
        version_type = form.get("version_type")
        if not isinstance(us_id, str) or not us_id:
            raise InvalidRequestError("missing field 'us_id'")
        if not isinstance(version_type, str) or not version_type:
            raise InvalidRequestError("missing field 'version_type'")
        parts = form.getlist("files")
        if len(parts) > state.max_files:
            raise TooManyFilesError(f"at most {state.max_files} files per upload")
        files: list[tuple[str, bytes]] = []
        for part in parts:
            if isinstance(part, str):
                raise InvalidRequestError("'files' parts must be file uploads")
            content = await part.read()
            if len(content) > state.max_file_bytes:
                raise FileTooLargeError(
                    f"{part.filename} exceeds {state.max_file_bytes} bytes"
                )
            files.append((part.filename or "", content))
        if us_id not in state.store.visible_us(session):
            raise UnauthorizedError(f"U.S {us_id} is not assigned to you")
        unit = state.vault.unit(us_id)
        if unit is None:
            raise UnknownUsError(f"unknown U.S {us_id}")
        version = state.vault.store_upload(
            unit, state.clock.today(), version_type, files
        )
        result = control_us(
            session, state.store, state.vault, state.dictionary, state.rules,
            us_id, state.clock.now(), state.listings,
        )
        payload = control_payload(result)
        payload["version"] = _version_payload(version)
        return payload

    @app.get("/api/report")
    async def report(request: Request):
        session = authenticated(request)
        params = request.query_params
        unknown = set(params.keys()) - {"eo", "us_id", "version_type", "date_from", "date_to"}
        if unknown:
            raise InvalidFilterError(f"unknown filters: {', '.join(sorted(unknown))}")
        filter = ReportFilter(
            eo=params.get("eo"),
            us_id=params.get("us_id"),
            version_type=params.get("version_type"),
            date_from=_query_date(params.get("date_from")),
            date_to=_query_date(params.get("date_to")),
        )
        result = pursuit_report(session, state.store, state.vault, filter, state.clock.now())
        return report_payload(result)

    @app.post("/api/control/{us_id}")
    async def control(us_id: str, request: Request):
        session = authenticated(request)
        result = control_us(
            session, state.store, state.vault, state.dictionary, state.rules,
            us_id, state.clock.now(), state.listings,
        )
        return control_payload(result)

    @app.get("/api/listings/{listing_id}")
    async def listing(listing_id: str, request: Request):
        session = authenticated(request)
        us_id, payload, text = state.listings.get(listing_id)
        if us_id not in state.store.visible_us(session):
            raise UnauthorizedError(f"listing {listing_id} is outside your scope")
        if request.query_params.get("format") == "text":
            return PlainTextResponse(text)
        return {"listing_id": listing_id, "us_id": us_id, "listing": payload}

    return app


def serve(config: AppConfig) -> None:
    import uvicorn

    state = build_state(config)
    app = create_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")

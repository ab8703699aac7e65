"""Operator command line: bootstrap, ingestion, offline control, serving."""

from __future__ import annotations

import argparse
import sys
from datetime import timedelta
from pathlib import Path

from .accounts import AccountStore
from .clock import Clock, parse_clock
from .config import AppConfig, load_config
from .dictionary import DictionaryError, parse_dictionary
from .engine import parse_filename, run_control
from .errors import ConfigError, PlatformError
from .notify import notifier_from_spec
from .service import serve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panelvault",
        description="survey upload vault with automatic complete control",
    )
    parser.add_argument("--root", help="data directory (default panelvault-data)")
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--clock", help="fixed ISO instant instead of wall time")
    sub = parser.add_subparsers(dest="command", required=True)

    init = sub.add_parser("init", help="create the data tree and the administrator")
    init.add_argument("--username", default="admin")
    init.add_argument("--email", required=True)

    roster = sub.add_parser("import-roster", help="load the controller roster CSV")
    roster.add_argument("file")

    dictionary = sub.add_parser(
        "import-dictionary", help="validate and install a data dictionary"
    )
    dictionary.add_argument("file")

    control = sub.add_parser("control", help="run complete control on local files")
    control.add_argument("dictionary")
    control.add_argument("files", nargs="+")

    sub.add_parser("serve", help="run the HTTP API")
    return parser


def _clock_for(config: AppConfig) -> Clock:
    if config.clock is None:
        return Clock()
    try:
        return parse_clock(config.clock)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _store_for(config: AppConfig) -> AccountStore:
    config.root.mkdir(parents=True, exist_ok=True)
    notifier = notifier_from_spec(config.notifier or f"outbox:{config.root / 'outbox'}")
    return AccountStore(
        config.root / "accounts.json",
        notifier,
        _clock_for(config),
        timedelta(seconds=config.session_ttl),
    )


def cmd_init(config: AppConfig, username: str, email: str) -> int:
    store = _store_for(config)
    account, password = store.bootstrap_admin(username, email)
    (config.root / "vault").mkdir(exist_ok=True)
    print(f"administrator {account.username} created under {config.root}")
    print(f"password: {password}")
    return 0


def cmd_import_roster(config: AppConfig, path: str) -> int:
    store = _store_for(config)
    count = store.import_roster(Path(path).read_text("utf-8"))
    print(f"{count} entries")
    return 0


def cmd_import_dictionary(config: AppConfig, path: str) -> int:
    text = Path(path).read_text("utf-8")
    dictionary, rules = parse_dictionary(text)
    config.root.mkdir(parents=True, exist_ok=True)
    (config.root / "dictionary.txt").write_text(text, "utf-8")
    print(
        f"dictionary {dictionary.name}: "
        f"{len(dictionary.records)} record types, {len(rules)} rules"
    )
    return 0


def cmd_control(config: AppConfig, dictionary_path: str, file_paths: list[str]) -> int:
    dictionary, rules = parse_dictionary(Path(dictionary_path).read_text("utf-8"))
    files = []
    for raw in file_paths:
        path = Path(raw)
        parse_filename(path.name)
        files.append((path.name, path.read_bytes()))
    listing = run_control(dictionary, rules, files, _clock_for(config).now())
    sys.stdout.write(listing.to_text())
    return 0 if listing.error_count == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(
            {"root": args.root, "clock": args.clock}, config_path=args.config
        )
        if args.command == "init":
            return cmd_init(config, args.username, args.email)
        if args.command == "import-roster":
            return cmd_import_roster(config, args.file)
        if args.command == "import-dictionary":
            return cmd_import_dictionary(config, args.file)
        if args.command == "control":
            return cmd_control(config, args.dictionary, args.files)
        serve(config)
        return 0
    except DictionaryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PlatformError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

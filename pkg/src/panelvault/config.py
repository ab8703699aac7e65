"""Runtime configuration: flags > environment > config file > defaults."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import ConfigError

ENV_PREFIX = "PANELVAULT_"
CONFIG_SECTION = "panelvault"

_KEYS = ("root", "dictionary", "roster", "host", "port", "session_ttl", "notifier", "clock")


@dataclass(frozen=True)
class AppConfig:
    root: Path
    dictionary: Path | None = None  # defaults to <root>/dictionary.txt at build time
    roster: Path | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    session_ttl: int = 28800  # seconds
    notifier: str | None = None  # defaults to outbox:<root>/outbox at build time
    clock: str | None = None  # fixed ISO instant, tests only


def _read_config_file(path: Path) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    if not parser.has_section(CONFIG_SECTION):
        return {}
    values = dict(parser.items(CONFIG_SECTION))
    unknown = set(values) - set(_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return values


def load_config(
    flags: Mapping[str, object] | None = None,
    env: Mapping[str, str] | None = None,
    config_path: Path | str | None = None,
) -> AppConfig:
    """Merge the three sources over defaults; `flags` values of None are unset."""
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    env = os.environ if env is None else env

    merged: dict = {}
    if config_path is None and env.get(ENV_PREFIX + "CONFIG"):
        config_path = env[ENV_PREFIX + "CONFIG"]
    if config_path is not None:
        merged.update(_read_config_file(Path(config_path)))
    for key in _KEYS:
        value = env.get(ENV_PREFIX + key.upper())
        if value is not None:
            merged[key] = value
    for key, value in flags.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = value

    def path_or_none(key: str) -> Path | None:
        value = merged.get(key)
        return Path(value) if value is not None else None

    def int_value(key: str, default: int) -> int:
        value = merged.get(key, default)
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None

    port = int_value("port", 8000)
    if not 1 <= port <= 65535:
        raise ConfigError(f"port must be in 1..65535, got {port}")
    session_ttl = int_value("session_ttl", 28800)
    if session_ttl < 1:
        raise ConfigError(f"session_ttl must be positive, got {session_ttl}")

    return AppConfig(
        root=Path(merged.get("root", "panelvault-data")),
        dictionary=path_or_none("dictionary"),
        roster=path_or_none("roster"),
        host=str(merged.get("host", "127.0.0.1")),
        port=port,
        session_ttl=session_ttl,
        notifier=merged.get("notifier"),
        clock=merged.get("clock"),
    )

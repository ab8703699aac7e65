"""Credential delivery ports: a file outbox for tests and SMTP for deployment."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import ConfigError, StorageError


class Notifier(Protocol):
    def send(self, to: str, subject: str, body: str) -> None: ...


@dataclass(frozen=True)
class OutboxMessage:
    to: str
    subject: str
    body: str


_MSG_RE = re.compile(r"^msg-(\d{4})\.txt$")


class OutboxNotifier:
    """Writes one `msg-NNNN.txt` per message; numbering survives restarts."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create outbox {self.directory}: {exc}") from exc

    def _next_number(self) -> int:
        numbers = [
            int(match.group(1))
            for entry in self.directory.iterdir()
            if (match := _MSG_RE.match(entry.name))
        ]
        return max(numbers, default=0) + 1

    def send(self, to: str, subject: str, body: str) -> None:
        path = self.directory / f"msg-{self._next_number():04d}.txt"
        path.write_text(f"To: {to}\nSubject: {subject}\n\n{body}", "utf-8")

    def messages(self) -> list[OutboxMessage]:
        out = []
        for path in sorted(self.directory.iterdir()):
            if not _MSG_RE.match(path.name):
                continue
            text = path.read_text("utf-8")
            header, _, body = text.partition("\n\n")
            fields = dict(
                line.split(": ", 1) for line in header.splitlines() if ": " in line
            )
            out.append(OutboxMessage(fields.get("To", ""), fields.get("Subject", ""), body))
        return out


class SmtpNotifier:
    def __init__(self, host: str, port: int, sender: str = "noreply@panelvault.local"):
        self.host = host
        self.port = port
        self.sender = sender

    def send(self, to: str, subject: str, body: str) -> None:
        import smtplib
        from email.message import EmailMessage

        message = EmailMessage()
        message["From"] = self.sender
        message["To"] = to
        message["Subject"] = subject
        message.set_content(body)
        with smtplib.SMTP(self.host, self.port) as smtp:
            smtp.send_message(message)


def notifier_from_spec(spec: str) -> Notifier:
    """`outbox:<dir>` or `smtp:<host>:<port>`."""
    kind, _, rest = spec.partition(":")
    if kind == "outbox" and rest:
        return OutboxNotifier(rest)
    if kind == "smtp" and rest:
        host, _, port_text = rest.rpartition(":")
        if host and port_text.isdigit():
            return SmtpNotifier(host, int(port_text))
    raise ConfigError(f"notifier must be outbox:<dir> or smtp:<host>:<port>, got {spec!r}")

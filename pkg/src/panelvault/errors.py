"""Error vocabulary shared by every module.

Each error carries a stable machine code; the HTTP layer maps codes to
status codes through a single exhaustive table.
"""

from __future__ import annotations


class PlatformError(Exception):
    """Base class for all domain errors."""

    code = "internal"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class BadCredentialsError(PlatformError):
    code = "bad-credentials"


class UnknownSessionError(PlatformError):
    code = "unknown-session"


class UnauthorizedError(PlatformError):
    code = "unauthorized"


class UnknownEoError(PlatformError):
    code = "unknown-eo"


class UnknownCodeError(PlatformError):
    code = "unknown-code"


class ForeignEoError(PlatformError):
    code = "foreign-eo"


class DuplicateSupervisorError(PlatformError):
    code = "duplicate-supervisor"


class DuplicateAccountError(PlatformError):
    code = "duplicate-account"


class InvalidEmailError(PlatformError):
    code = "invalid-email"


class WeakPasswordError(PlatformError):
    code = "weak-password"


class RosterImportError(PlatformError):
    code = "roster-import"

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedFilenameError(PlatformError):
    code = "malformed-filename"


class UsMismatchError(PlatformError):
    code = "us-mismatch"


class UnknownUsError(PlatformError):
    code = "unknown-us"


class NoVersionsError(PlatformError):
    code = "no-versions"


class UnknownFileError(PlatformError):
    code = "unknown-file"


class UnknownListingError(PlatformError):
    code = "unknown-listing"


class EmptyUploadError(PlatformError):
    code = "empty-upload"


class FileTooLargeError(PlatformError):
    code = "file-too-large"


class TooManyFilesError(PlatformError):
    code = "too-many-files"


class InvalidFilterError(PlatformError):
    code = "invalid-filter"


class InvalidRequestError(PlatformError):
    code = "invalid-request"


class VersionOrderError(PlatformError):
    code = "version-order"


class StorageError(PlatformError):
    code = "storage-failure"


class AlreadyInitializedError(PlatformError):
    code = "already-initialized"


class ConfigError(PlatformError):
    code = "invalid-config"

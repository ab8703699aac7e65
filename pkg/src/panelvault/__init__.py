"""Survey upload vault with automatic complete control.

Field controllers upload fixed-width survey data files; every upload is
decoded against a data dictionary, checked against a rule set, stored as a
dated version per secondary unit, and summarized in role-scoped pursuit
reports. The package exposes the same model through a Python API, an HTTP
service, and a command line.
"""

from .clock import Clock, FixedClock
from .dictionary import (
    DataDictionary,
    DictionaryError,
    FieldSpec,
    RecordSpec,
    Rule,
    parse_dictionary,
    serialize_dictionary,
)
from .engine import (
    DataFileName,
    DecodedFile,
    ErrorListing,
    Finding,
    decode_file,
    parse_filename,
    run_control,
)
from .errors import PlatformError
from .expressions import MISSING, format_expr, parse_expr
from .vault import SecondaryUnit, UsVersion, Vault

__version__ = "0.1.0"

__all__ = [
    "Clock",
    "FixedClock",
    "DataDictionary",
    "DictionaryError",
    "FieldSpec",
    "RecordSpec",
    "Rule",
    "parse_dictionary",
    "serialize_dictionary",
    "DataFileName",
    "DecodedFile",
    "ErrorListing",
    "Finding",
    "decode_file",
    "parse_filename",
    "run_control",
    "PlatformError",
    "MISSING",
    "format_expr",
    "parse_expr",
    "SecondaryUnit",
    "UsVersion",
    "Vault",
    "__version__",
]

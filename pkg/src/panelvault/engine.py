"""Complete control: decode fixed-width files, run checks, build the listing.

Everything here is pure: run_control is a function of the dictionary, the
rules, the file bytes and the supplied timestamp, and two runs over the
same inputs produce byte-identical text listings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Mapping, Sequence, Union

from .dictionary import (
    ALPHA,
    DataDictionary,
    HOUSEHOLD_SCOPE,
    NUMERIC,
    RecordSpec,
    Rule,
    SEVERITY_ERROR,
    SEVERITY_WARNING,
)
from .errors import MalformedFilenameError
from .expressions import (
    MISSING,
    And,
    Arith,
    Compare,
    Expr,
    FieldRef,
    IntLit,
    MissingLit,
    Neg,
    Not,
    Or,
    StrLit,
    Value,
)

_FILENAME_RE = re.compile(r"^([A-Z])(\d{4})s(\d{3})D\.dat$")

# pseudo-subjects for findings not tied to a single field or rule
SUBJECT_RECORD = "RECORD"
SUBJECT_HOUSEHOLD = "HOUSEHOLD"
SUBJECT_FINALITY = "FINALITY"

_NUMERIC_RE = re.compile(r"^-?\d+$")


@dataclass(frozen=True, order=True)
class DataFileName:
    """Parsed `<EO letter><4-digit US>s<3-digit seq>D.dat` name."""

    raw: str
    eo_letter: str
    us_id: str
    seq: str


def parse_filename(name: str) -> DataFileName:
    match = _FILENAME_RE.match(name)
    if match is None:
        raise MalformedFilenameError(
            f"{name!r} does not match <EO letter><USUS>s<SEQ>D.dat"
        )
    return DataFileName(name, match.group(1), match.group(2), match.group(3))


FileName = Union[DataFileName, str]


def _as_filename(name: FileName) -> DataFileName:
    return name if isinstance(name, DataFileName) else parse_filename(name)


@dataclass(frozen=True)
class Finding:
    file: str
    line: int
    subject: str
    severity: str
    message: str

    @property
    def sort_key(self) -> tuple[str, int, str]:
        return (self.file, self.line, self.subject)


@dataclass
class DecodedRecord:
    line: int
    spec: RecordSpec
    values: dict[str, Value]


@dataclass
class DecodedFile:
    source: DataFileName
    records: list[DecodedRecord]
    findings: list[Finding]


# --- Decoding ------------------------------------------------------------

def decode_file(dictionary: DataDictionary, content: bytes, source: FileName) -> DecodedFile:
    """Decode one data file; structural defects become findings, never errors."""
    source = _as_filename(source)
    records: list[DecodedRecord] = []
    findings: list[Finding] = []

    def report(line: int, subject: str, message: str) -> None:
        findings.append(Finding(source.raw, line, subject, SEVERITY_ERROR, message))

    for number, raw in enumerate(content.splitlines(), start=1):
        if any(byte >= 0x80 for byte in raw):
            report(number, SUBJECT_RECORD, "non-ASCII byte in record")
            continue
        line = raw.decode("ascii")
        if len(line) != dictionary.record_length:
            report(
                number,
                SUBJECT_RECORD,
                f"record length mismatch ({len(line)} chars, expected {dictionary.record_length})",
            )
            continue
        code = line[dictionary.type_pos - 1]
        spec = dictionary.record_by_code(code)
        if spec is None:
            report(number, SUBJECT_RECORD, f"unknown record type {code!r}")
            continue
        values: dict[str, Value] = {}
        for field in spec.fields:
            slice_ = line[field.start - 1 : field.end]
            text = slice_.strip()
            if text == "":
                values[field.name] = MISSING
            elif field.kind == NUMERIC:
                if _NUMERIC_RE.match(text):
                    values[field.name] = int(text)
                else:
                    report(number, field.name, f"malformed numeric value {slice_!r}")
                    values[field.name] = MISSING
            else:
                values[field.name] = text
        records.append(DecodedRecord(number, spec, values))

    return DecodedFile(source, records, findings)


# --- Validity checks -----------------------------------------------------

def _format_set(values: frozenset) -> str:
    ordered = sorted(values, key=lambda v: (isinstance(v, str), v))
    return "{" + ",".join(str(v) for v in ordered) + "}"


def check_fields(dictionary: DataDictionary, decoded: DecodedFile) -> list[Finding]:
    """One error finding per out-of-range, out-of-set or forbidden-blank value."""
    findings: list[Finding] = []
    for record in decoded.records:
        for field in record.spec.fields:
            value = record.values[field.name]
            if value is MISSING:
                if not field.blank_allowed:
                    findings.append(
                        Finding(
                            decoded.source.raw, record.line, field.name,
                            SEVERITY_ERROR, "blank not allowed",
                        )
                    )
                continue
            if field.value_range is not None:
                low, high = field.value_range
                if not low <= value <= high:
                    findings.append(
                        Finding(
                            decoded.source.raw, record.line, field.name,
                            SEVERITY_ERROR, f"value {value} outside range {low}-{high}",
                        )
                    )
            elif field.values is not None and value not in field.values:
                findings.append(
                    Finding(
                        decoded.source.raw, record.line, field.name,
                        SEVERITY_ERROR, f"value {value} not in {_format_set(field.values)}",
                    )
                )
    return findings


# --- Rule evaluation -----------------------------------------------------

class _Tainted(Exception):
    """A non-exempt comparison or arithmetic touched MISSING."""


def compile_expr(expr: Expr) -> Callable[[Mapping[str, Value]], object]:
    """Compile an expression into a closure over a field environment.

    Closures raise _Tainted when evaluation touches MISSING outside an
    equality test against the MISSING literal; rule_violated turns that
    into "not violated". Evaluation is total: and/or do not short-circuit,
    so taint anywhere in the tree always surfaces.
    """
    if isinstance(expr, IntLit):
        value = expr.value
        return lambda env: value
    if isinstance(expr, StrLit):
        text = expr.value
        return lambda env: text
    if isinstance(expr, MissingLit):
        return lambda env: MISSING
    if isinstance(expr, FieldRef):
        name = expr.name
        return lambda env: env.get(name, MISSING)
    if isinstance(expr, Neg):
        operand = compile_expr(expr.operand)

        def negate(env):
            value = operand(env)
            if value is MISSING:
                raise _Tainted
            return -value

        return negate
    if isinstance(expr, Not):
        operand = compile_expr(expr.operand)
        return lambda env: not operand(env)
    if isinstance(expr, Arith):
        left = compile_expr(expr.left)
        right = compile_expr(expr.right)
        op = expr.op

        def arithmetic(env):
            a = left(env)
            b = right(env)
            if a is MISSING or b is MISSING:
                raise _Tainted
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if b == 0:
                raise _Tainted
            quotient = abs(a) // abs(b)
            return -quotient if (a < 0) != (b < 0) else quotient

        return arithmetic
    if isinstance(expr, Compare):
        left = compile_expr(expr.left)
        right = compile_expr(expr.right)
        op = expr.op
        if op in ("==", "!="):
            if isinstance(expr.left, MissingLit) or isinstance(expr.right, MissingLit):

                def missing_test(env):
                    equal = (left(env) is MISSING) == (right(env) is MISSING)
                    return equal if op == "==" else not equal

                return missing_test

            def equality(env):
                a = left(env)
                b = right(env)
                if a is MISSING or b is MISSING:
                    raise _Tainted
                equal = type(a) is type(b) and a == b
                return equal if op == "==" else not equal

            return equality

        def ordering(env):
            a = left(env)
            b = right(env)
            if a is MISSING or b is MISSING:
                raise _Tainted
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            return a >= b

        return ordering
    if isinstance(expr, And):
        left = compile_expr(expr.left)
        right = compile_expr(expr.right)

        def conjunction(env):
            a = left(env)
            b = right(env)
            return bool(a) and bool(b)

        return conjunction
    if isinstance(expr, Or):
        left = compile_expr(expr.left)
        right = compile_expr(expr.right)

        def disjunction(env):
            a = left(env)
            b = right(env)
            return bool(a) or bool(b)

        return disjunction
    raise TypeError(f"not an expression node: {expr!r}")


def rule_violated(compiled: Callable, env: Mapping[str, Value]) -> bool:
    try:
        return compiled(env) is False
    except _Tainted:
        return False


def _household_groups(decoded: DecodedFile) -> list[tuple[int, object, list[DecodedRecord]]]:
    """Contiguous runs of records sharing a household key value.

    Records whose spec has no household key, or whose key is blank, close
    the current run and belong to no household.
    """
    groups: list[tuple[int, object, list[DecodedRecord]]] = []
    current_key: object = None
    current: list[DecodedRecord] = []

    def flush() -> None:
        nonlocal current, current_key
        if current:
            groups.append((current[0].line, current_key, current))
        current = []
        current_key = None

    for record in decoded.records:
        key_field = record.spec.household_key
        key = record.values.get(key_field) if key_field else None
        if key_field is None or key is MISSING:
            flush()
            continue
        if current and key == current_key:
            current.append(record)
        else:
            flush()
            current_key = key
            current.append(record)
    flush()
    return groups


def check_rules(rules: Sequence[Rule], decoded: DecodedFile) -> list[Finding]:
    """Evaluate rules; emit a finding whenever an expression comes out false."""
    findings: list[Finding] = []
    record_rules: dict[str, list[tuple[Rule, Callable]]] = {}
    household_rules: list[tuple[Rule, Callable]] = []
    for rule in rules:
        compiled = compile_expr(rule.expr)
        if rule.record is HOUSEHOLD_SCOPE:
            household_rules.append((rule, compiled))
        else:
            record_rules.setdefault(rule.record, []).append((rule, compiled))

    for record in decoded.records:
        for rule, compiled in record_rules.get(record.spec.name, ()):
            if rule_violated(compiled, record.values):
                findings.append(
                    Finding(decoded.source.raw, record.line, rule.id, rule.severity, rule.message)
                )

    if household_rules:
        for first_line, _key, members in _household_groups(decoded):
            env: dict[str, Value] = {}
            for record in members:
                for name, value in record.values.items():
                    env.setdefault(name, value)
            for rule, compiled in household_rules:
                if rule_violated(compiled, env):
                    findings.append(
                        Finding(decoded.source.raw, first_line, rule.id, rule.severity, rule.message)
                    )
    return findings


# --- Error listing -------------------------------------------------------

@dataclass(frozen=True)
class ErrorListing:
    """Outcome of one control run; summary numbers are always recomputed."""

    produced_at: datetime
    inputs: tuple[str, ...]
    findings: tuple[Finding, ...]

    @property
    def error_count(self) -> int:
        return sum(1 for f in self.findings if f.severity == SEVERITY_ERROR)

    @property
    def warning_count(self) -> int:
        return sum(1 for f in self.findings if f.severity == SEVERITY_WARNING)

    def by_subject(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for finding in self.findings:
            counts[finding.subject] = counts.get(finding.subject, 0) + 1
        return counts

    def to_text(self) -> str:
        lines = [
            f"CONTROL LISTING {self.produced_at.isoformat()} files={len(self.inputs)}"
        ]
        for f in self.findings:
            lines.append(f"{f.file}:{f.line} {f.severity} {f.subject} {f.message}")
        lines.append(f"SUMMARY errors={self.error_count} warnings={self.warning_count}")
        return "\n".join(lines) + "\n"

    def to_payload(self) -> dict:
        return {
            "produced_at": self.produced_at.isoformat(),
            "inputs": list(self.inputs),
            "findings": [
                {
                    "file": f.file,
                    "line": f.line,
                    "subject": f.subject,
                    "severity": f.severity,
                    "message": f.message,
                }
                for f in self.findings
            ],
            "summary": {
                "errors": self.error_count,
                "warnings": self.warning_count,
                "by_subject": self.by_subject(),
            },
        }


def with_extra_findings(listing: ErrorListing, extra: Sequence[Finding]) -> ErrorListing:
    """New listing with extra findings merged in, global order preserved."""
    merged = sorted(list(listing.findings) + list(extra), key=lambda f: f.sort_key)
    return ErrorListing(listing.produced_at, listing.inputs, tuple(merged))


def run_control(
    dictionary: DataDictionary,
    rules: Sequence[Rule],
    files: Sequence[tuple[FileName, bytes]],
    produced_at: datetime,
) -> ErrorListing:
    """Control the concatenation of the given files.

    Files are processed in ascending filename order regardless of the
    order handed in; finding line numbers stay per source file. A
    household key value seen in more than one file yields one warning.
    """
    named = sorted(
        ((_as_filename(name), content) for name, content in files),
        key=lambda pair: pair[0].raw,
    )
    findings: list[Finding] = []
    household_files: dict[object, dict[str, int]] = {}

    for source, content in named:
        decoded = decode_file(dictionary, content, source)
        findings.extend(decoded.findings)
        findings.extend(check_fields(dictionary, decoded))
        findings.extend(check_rules(rules, decoded))
        for record in decoded.records:
            key_field = record.spec.household_key
            if not key_field:
                continue
            key = record.values.get(key_field)
            if key is MISSING or key is None:
                continue
            seen = household_files.setdefault(key, {})
            seen.setdefault(source.raw, record.line)

    for key in sorted(household_files, key=str):
        seen = household_files[key]
        if len(seen) > 1:
            last_file = max(seen)
            findings.append(
                Finding(
                    last_file,
                    seen[last_file],
                    SUBJECT_HOUSEHOLD,
                    SEVERITY_WARNING,
                    f"household {key} appears in {len(seen)} files",
                )
            )

    findings.sort(key=lambda f: f.sort_key)
    inputs = tuple(source.raw for source, _ in named)
    return ErrorListing(produced_at, inputs, tuple(findings))

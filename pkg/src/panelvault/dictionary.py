"""Data dictionary: record layouts, field specs and consistency rules.

The dictionary source is a line-oriented, INI-style text format:

    [dictionary]          one per file, first section
    [record NAME]         one per record type
    [field NAME.FIELD]    after its record
    [rule ID]             per-record (record = NAME) or household scope
                          (scope = household)

Full-line comments start with '#'. Keys are `key = value`. See the
serializer for the canonical form; parse(serialize(d, r)) == (d, r).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field

from .expressions import (
    Expr,
    ExprSyntaxError,
    ResolutionError,
    format_expr,
    parse_expr,
    referenced_fields,
    resolve_expr,
)

NUMERIC = "numeric"
ALPHA = "alpha"

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"


class DictionaryError(ValueError):
    """Dictionary source rejected; line is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.bare_message = message
        self.line = line


@dataclass(frozen=True)
class FieldSpec:
    name: str
    start: int  # 1-based column
    length: int
    kind: str = NUMERIC
    value_range: tuple[int, int] | None = None
    values: frozenset | None = None
    blank_allowed: bool = False

    @property
    def end(self) -> int:
        """Last column occupied, inclusive."""
        return self.start + self.length - 1


@dataclass(frozen=True)
class RecordSpec:
    type_code: str
    name: str
    fields: tuple[FieldSpec, ...]
    household_key: str | None = None

    def field_named(self, name: str) -> FieldSpec | None:
        for spec in self.fields:
            if spec.name == name:
                return spec
        return None


@dataclass(frozen=True)
class DataDictionary:
    name: str
    record_length: int
    type_pos: int
    records: tuple[RecordSpec, ...]

    def record_by_code(self, code: str) -> RecordSpec | None:
        for record in self.records:
            if record.type_code == code:
                return record
        return None

    def record_by_name(self, name: str) -> RecordSpec | None:
        for record in self.records:
            if record.name == name:
                return record
        return None


HOUSEHOLD_SCOPE = None  # Rule.record value for household-scope rules


@dataclass(frozen=True)
class Rule:
    id: str
    record: str | None  # record name, or None for household scope
    expr: Expr
    message: str
    severity: str = SEVERITY_ERROR


_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_SECTION_RE = re.compile(r"^\[\s*([a-z]+)(?:\s+([^\]]+?))?\s*\]$")
_RANGE_RE = re.compile(r"^(-?\d+)\s*-\s*(-?\d+)$")


# --- Validation ----------------------------------------------------------

def validate_dictionary(dictionary: DataDictionary, line_of: dict | None = None) -> None:
    """Check every structural invariant; raises DictionaryError.

    line_of optionally maps (record_name) or (record_name, field_name) to
    source lines so errors out of the parser point at the defect.
    """
    lines = line_of or {}

    def where(key) -> int:
        return lines.get(key, 1)

    if dictionary.record_length < 1:
        raise DictionaryError("record_length must be positive", where("dictionary"))
    if not 1 <= dictionary.type_pos <= dictionary.record_length:
        raise DictionaryError("type_pos outside the record", where("dictionary"))

    seen_codes: dict[str, str] = {}
    seen_names: set[str] = set()
    for record in dictionary.records:
        if len(record.type_code) != 1:
            raise DictionaryError(
                f"type_code must be one character, got {record.type_code!r}",
                where(record.name),
            )
        if record.type_code in seen_codes:
            raise DictionaryError(
                f"duplicate type code {record.type_code!r} "
                f"(records {seen_codes[record.type_code]} and {record.name})",
                where(record.name),
            )
        seen_codes[record.type_code] = record.name
        if record.name in seen_names:
            raise DictionaryError(f"duplicate record name {record.name}", where(record.name))
        seen_names.add(record.name)

        field_names: set[str] = set()
        claimed: list[FieldSpec] = []
        for spec in record.fields:
            key = (record.name, spec.name)
            if spec.name in field_names:
                raise DictionaryError(
                    f"duplicate field {spec.name} in record {record.name}", where(key)
                )
            field_names.add(spec.name)
            if spec.length < 1:
                raise DictionaryError(f"field {spec.name}: length must be positive", where(key))
            if spec.start < 1 or spec.end > dictionary.record_length:
                raise DictionaryError(
                    f"field {spec.name} exceeds record length "
                    f"(columns {spec.start}-{spec.end} vs length {dictionary.record_length})",
                    where(key),
                )
            if spec.start <= dictionary.type_pos <= spec.end:
                raise DictionaryError(
                    f"field {spec.name} claims the type position column {dictionary.type_pos}",
                    where(key),
                )
            for other in claimed:
                if spec.start <= other.end and other.start <= spec.end:
                    raise DictionaryError(
                        f"fields {other.name} and {spec.name} overlap in record {record.name}",
                        where(key),
                    )
            claimed.append(spec)
            if spec.kind not in (NUMERIC, ALPHA):
                raise DictionaryError(f"field {spec.name}: unknown kind {spec.kind!r}", where(key))
            if spec.value_range is not None and spec.values is not None:
                raise DictionaryError(
                    f"field {spec.name}: range and values are mutually exclusive", where(key)
                )
            if spec.value_range is not None:
                if spec.kind != NUMERIC:
                    raise DictionaryError(
                        f"field {spec.name}: range applies to numeric fields only", where(key)
                    )
                low, high = spec.value_range
                if low > high:
                    raise DictionaryError(
                        f"field {spec.name}: range {low}-{high} is inverted", where(key)
                    )

        if record.household_key is not None and record.household_key not in field_names:
            raise DictionaryError(
                f"household_key {record.household_key} is not a field of {record.name}",
                where(record.name),
            )


def _household_field_kinds(dictionary: DataDictionary) -> dict[str, str]:
    """Field name -> kind across all records that carry a household key.

    A name present with two different kinds is ambiguous for household
    scope rules and rejected at resolution time.
    """
    kinds: dict[str, str] = {}
    for record in dictionary.records:
        if record.household_key is None:
            continue
        for spec in record.fields:
            if spec.name in kinds and kinds[spec.name] != spec.kind:
                raise ResolutionError(
                    f"field {spec.name} has conflicting kinds across household records"
                )
            kinds[spec.name] = spec.kind
    return kinds


def validate_rules(dictionary: DataDictionary, rules: list[Rule],
                   line_of: dict | None = None) -> None:
    lines = line_of or {}
    seen: set[str] = set()
    for rule in rules:
        at = lines.get(rule.id, 1)
        if rule.id in seen:
            raise DictionaryError(f"duplicate rule id {rule.id}", at)
        seen.add(rule.id)
        if rule.severity not in (SEVERITY_ERROR, SEVERITY_WARNING):
            raise DictionaryError(f"rule {rule.id}: unknown severity {rule.severity!r}", at)
        if rule.record is HOUSEHOLD_SCOPE:
            try:
                kinds = _household_field_kinds(dictionary)
            except ResolutionError as exc:
                raise DictionaryError(f"rule {rule.id}: {exc}", at) from exc
            if not kinds:
                raise DictionaryError(
                    f"rule {rule.id}: household scope but no record has a household_key", at
                )
        else:
            record = dictionary.record_by_name(rule.record)
            if record is None:
                raise DictionaryError(f"rule {rule.id}: unknown record {rule.record}", at)
            kinds = {spec.name: spec.kind for spec in record.fields}
        try:
            result = resolve_expr(rule.expr, kinds)
        except ResolutionError as exc:
            raise DictionaryError(f"rule {rule.id}: {exc}", at) from exc
        if result != "bool":
            raise DictionaryError(f"rule {rule.id}: expression is not a condition", at)


# --- Parser --------------------------------------------------------------

@dataclass
class _RecordBuilder:
    name: str
    line: int
    keys: dict = dc_field(default_factory=dict)
    fields: list[FieldSpec] = dc_field(default_factory=list)


class _DictParser:
    def __init__(self, text: str):
        self.text = text
        self.dict_keys: dict[str, str] = {}
        self.dict_line = 0
        self.records: list[_RecordBuilder] = []
        self.by_name: dict[str, _RecordBuilder] = {}
        self.rules: list[Rule] = []
        self.line_of: dict = {}
        # current section: ("dictionary",) / ("record", builder) /
        # ("field", builder, name, line) / ("rule", id, line)
        self.section: tuple | None = None
        self.section_keys: dict[str, tuple[str, int]] = {}

    def parse(self) -> tuple[DataDictionary, list[Rule]]:
        for number, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("["):
                self.close_section()
                self.open_section(line, number)
            else:
                self.add_key(line, number)
        self.close_section()

        if self.dict_line == 0:
            raise DictionaryError("missing [dictionary] section", 1)
        dictionary = self.build_dictionary()
        validate_dictionary(dictionary, self.line_of)
        validate_rules(dictionary, self.rules, self.line_of)
        return dictionary, self.rules

    def open_section(self, line: str, number: int) -> None:
        match = _SECTION_RE.match(line)
        if match is None:
            raise DictionaryError(f"malformed section header {line!r}", number)
        kind, arg = match.group(1), match.group(2)
        self.section_keys = {}
        if kind == "dictionary":
            if arg is not None:
                raise DictionaryError("[dictionary] takes no name", number)
            if self.dict_line:
                raise DictionaryError("second [dictionary] section", number)
            self.dict_line = number
            self.line_of["dictionary"] = number
            self.section = ("dictionary",)
        elif kind == "record":
            if not arg or not _IDENT_RE.match(arg):
                raise DictionaryError("[record] needs an identifier name", number)
            if arg in self.by_name:
                raise DictionaryError(f"duplicate record name {arg}", number)
            builder = _RecordBuilder(arg, number)
            self.records.append(builder)
            self.by_name[arg] = builder
            self.line_of[arg] = number
            self.section = ("record", builder)
        elif kind == "field":
            if not arg or "." not in arg:
                raise DictionaryError("[field] needs RECORD.FIELD", number)
            record_name, field_name = arg.split(".", 1)
            if not _IDENT_RE.match(record_name) or not _IDENT_RE.match(field_name):
                raise DictionaryError(f"malformed field name {arg!r}", number)
            builder = self.by_name.get(record_name)
            if builder is None:
                raise DictionaryError(f"field for undeclared record {record_name}", number)
            self.line_of[(record_name, field_name)] = number
            self.section = ("field", builder, field_name, number)
        elif kind == "rule":
            if not arg or not _IDENT_RE.match(arg):
                raise DictionaryError("[rule] needs an identifier id", number)
            self.line_of[arg] = number
            self.section = ("rule", arg, number)
        else:
            raise DictionaryError(f"unknown section kind {kind!r}", number)

    def add_key(self, line: str, number: int) -> None:
        if self.section is None:
            raise DictionaryError("key outside any section", number)
        if "=" not in line:
            raise DictionaryError(f"expected key = value, got {line!r}", number)
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key in self.section_keys:
            raise DictionaryError(f"duplicate key {key}", number)
        self.section_keys[key] = (value, number)

    def close_section(self) -> None:
        if self.section is None:
            return
        kind = self.section[0]
        if kind == "dictionary":
            self.dict_keys = {k: v for k, (v, _) in self.section_keys.items()}
            self.check_keys({"name", "record_length", "type_pos"}, self.dict_line)
        elif kind == "record":
            builder = self.section[1]
            builder.keys = dict(self.section_keys)
            self.check_keys({"type_code", "household_key"}, builder.line)
        elif kind == "field":
            _, builder, field_name, number = self.section
            builder.fields.append(self.build_field(field_name, number))
            self.check_keys(
                {"start", "length", "kind", "range", "values", "blank_allowed"}, number
            )
        elif kind == "rule":
            _, rule_id, number = self.section
            self.rules.append(self.build_rule(rule_id, number))
            self.check_keys({"record", "scope", "expr", "message", "severity"}, number)
        self.section = None
        self.section_keys = {}

    def check_keys(self, allowed: set[str], header_line: int) -> None:
        for key, (_, number) in self.section_keys.items():
            if key not in allowed:
                raise DictionaryError(f"unknown key {key!r}", number)

    def need(self, key: str, header_line: int) -> tuple[str, int]:
        if key not in self.section_keys:
            raise DictionaryError(f"missing key {key!r}", header_line)
        return self.section_keys[key]

    def int_value(self, key: str, header_line: int) -> int:
        value, number = self.need(key, header_line)
        try:
            return int(value)
        except ValueError:
            raise DictionaryError(f"{key} must be an integer, got {value!r}", number) from None

    def build_field(self, name: str, header_line: int) -> FieldSpec:
        start = self.int_value("start", header_line)
        length = self.int_value("length", header_line)
        kind = NUMERIC
        if "kind" in self.section_keys:
            kind, number = self.section_keys["kind"]
            if kind not in (NUMERIC, ALPHA):
                raise DictionaryError(f"kind must be numeric or alpha, got {kind!r}", number)
        value_range = None
        if "range" in self.section_keys:
            text, number = self.section_keys["range"]
            match = _RANGE_RE.match(text)
            if match is None:
                raise DictionaryError(f"range must look like LOW-HIGH, got {text!r}", number)
            value_range = (int(match.group(1)), int(match.group(2)))
        values = None
        if "values" in self.section_keys:
            text, number = self.section_keys["values"]
            parts = [part.strip() for part in text.split(",") if part.strip()]
            if not parts:
                raise DictionaryError("values must list at least one value", number)
            if kind == NUMERIC:
                try:
                    values = frozenset(int(part) for part in parts)
                except ValueError:
                    raise DictionaryError(
                        f"numeric field values must be integers, got {text!r}", number
                    ) from None
            else:
                values = frozenset(parts)
        blank_allowed = False
        if "blank_allowed" in self.section_keys:
            text, number = self.section_keys["blank_allowed"]
            if text not in ("yes", "no"):
                raise DictionaryError(f"blank_allowed must be yes or no, got {text!r}", number)
            blank_allowed = text == "yes"
        return FieldSpec(name, start, length, kind, value_range, values, blank_allowed)

    def build_rule(self, rule_id: str, header_line: int) -> Rule:
        has_record = "record" in self.section_keys
        has_scope = "scope" in self.section_keys
        if has_record == has_scope:
            raise DictionaryError(
                "rule needs exactly one of record = NAME or scope = household", header_line
            )
        record: str | None
        if has_scope:
            text, number = self.section_keys["scope"]
            if text != "household":
                raise DictionaryError(f"scope must be household, got {text!r}", number)
            record = HOUSEHOLD_SCOPE
        else:
            record, _ = self.section_keys["record"]
        source, number = self.need("expr", header_line)
        try:
            expr = parse_expr(source)
        except ExprSyntaxError as exc:
            raise DictionaryError(f"bad expression: {exc.bare_message}", number) from exc
        message, _ = self.need("message", header_line)
        severity = SEVERITY_ERROR
        if "severity" in self.section_keys:
            severity, number = self.section_keys["severity"]
            if severity not in (SEVERITY_ERROR, SEVERITY_WARNING):
                raise DictionaryError(
                    f"severity must be error or warning, got {severity!r}", number
                )
        return Rule(rule_id, record, expr, message, severity)

    def build_dictionary(self) -> DataDictionary:
        keys = self.dict_keys
        if "name" not in keys:
            raise DictionaryError("missing key 'name'", self.dict_line)
        if not _IDENT_RE.match(keys["name"]):
            raise DictionaryError(f"dictionary name must be an identifier", self.dict_line)
        if "record_length" not in keys:
            raise DictionaryError("missing key 'record_length'", self.dict_line)
        try:
            record_length = int(keys["record_length"])
            type_pos = int(keys.get("type_pos", "1"))
        except ValueError:
            raise DictionaryError("record_length and type_pos must be integers",
                                  self.dict_line) from None
        records = []
        for builder in self.records:
            if "type_code" not in builder.keys:
                raise DictionaryError(f"record {builder.name}: missing type_code", builder.line)
            type_code, _ = builder.keys["type_code"]
            household_key = None
            if "household_key" in builder.keys:
                household_key, _ = builder.keys["household_key"]
            records.append(
                RecordSpec(type_code, builder.name, tuple(builder.fields), household_key)
            )
        return DataDictionary(keys["name"], record_length, type_pos, tuple(records))


def parse_dictionary(text: str) -> tuple[DataDictionary, list[Rule]]:
    """Parse dictionary source into (DataDictionary, rules)."""
    return _DictParser(text).parse()


# --- Serializer ----------------------------------------------------------

def _format_values(values: frozenset) -> str:
    return ",".join(str(v) for v in sorted(values, key=lambda v: (isinstance(v, str), v)))


def serialize_dictionary(dictionary: DataDictionary, rules: list[Rule]) -> str:
    """Canonical source text; reparsing it reproduces the inputs exactly."""
    out: list[str] = []
    out.append("[dictionary]")
    out.append(f"name = {dictionary.name}")
    out.append(f"record_length = {dictionary.record_length}")
    out.append(f"type_pos = {dictionary.type_pos}")
    for record in dictionary.records:
        out.append("")
        out.append(f"[record {record.name}]")
        out.append(f"type_code = {record.type_code}")
        if record.household_key is not None:
            out.append(f"household_key = {record.household_key}")
        for spec in record.fields:
            out.append("")
            out.append(f"[field {record.name}.{spec.name}]")
            out.append(f"start = {spec.start}")
            out.append(f"length = {spec.length}")
            out.append(f"kind = {spec.kind}")
            if spec.value_range is not None:
                out.append(f"range = {spec.value_range[0]}-{spec.value_range[1]}")
            if spec.values is not None:
                out.append(f"values = {_format_values(spec.values)}")
            out.append(f"blank_allowed = {'yes' if spec.blank_allowed else 'no'}")
    for rule in rules:
        out.append("")
        out.append(f"[rule {rule.id}]")
        if rule.record is HOUSEHOLD_SCOPE:
            out.append("scope = household")
        else:
            out.append(f"record = {rule.record}")
        out.append(f"expr = {format_expr(rule.expr)}")
        out.append(f"message = {rule.message}")
        out.append(f"severity = {rule.severity}")
    return "\n".join(out) + "\n"

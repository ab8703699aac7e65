import random
from datetime import datetime

import pytest

from panelvault.dictionary import ALPHA, NUMERIC, parse_dictionary
from panelvault.engine import (
    ErrorListing,
    Finding,
    _Tainted,
    check_fields,
    check_rules,
    compile_expr,
    decode_file,
    parse_filename,
    rule_violated,
    run_control,
    with_extra_findings,
)
from panelvault.errors import MalformedFilenameError
from panelvault.expressions import MISSING, parse_expr

from fixtures import PERSON_DICTIONARY, data_bytes, person_line
from generators import random_condition, random_env
from reference_interpreter import reference_eval, reference_violated

DICTIONARY, RULES = parse_dictionary(PERSON_DICTIONARY)
AT = datetime(2012, 5, 31, 10, 0, 0)


# --- File names -----------------------------------------------------------

def test_filename_parsing():
    name = parse_filename("B0004s104D.dat")
    assert (name.eo_letter, name.us_id, name.seq) == ("B", "0004", "104")


@pytest.mark.parametrize(
    "bad",
    [
        "b0004s104D.dat",
        "B004s104D.dat",
        "B0004s14D.dat",
        "B0004s104D.txt",
        "B0004s104d.dat",
        "B0004x104D.dat",
        "B0004s104D.dat.bak",
    ],
)
def test_malformed_filenames_are_rejected(bad):
    with pytest.raises(MalformedFilenameError):
        parse_filename(bad)


# --- Decoding -------------------------------------------------------------

def test_fields_decode_from_their_exact_columns():
    decoded = decode_file(DICTIONARY, b"123456789012\n", "B2345s001D.dat")
    assert decoded.findings == []
    [record] = decoded.records
    assert record.values == {"US_ID": 2345, "HH_ID": 678, "AGE": 90, "SEX": 1, "MARITAL": 2}


def test_blank_fields_decode_to_missing():
    decoded = decode_file(
        DICTIONARY, data_bytes([person_line(age=None, marital=None)]), "B0004s001D.dat"
    )
    [record] = decoded.records
    assert record.values["AGE"] is MISSING
    assert record.values["MARITAL"] is MISSING
    assert record.values["HH_ID"] == 104


def test_wrong_length_line_is_skipped_with_a_finding():
    decoded = decode_file(DICTIONARY, b"1000410430\n", "B0004s001D.dat")
    assert decoded.records == []
    [finding] = decoded.findings
    assert finding.line == 1
    assert finding.subject == "RECORD"
    assert "record length mismatch" in finding.message
    assert "10 chars, expected 12" in finding.message


def test_unknown_record_type_is_skipped_with_a_finding():
    decoded = decode_file(DICTIONARY, b"900041043012\n", "B0004s001D.dat")
    assert decoded.records == []
    [finding] = decoded.findings
    assert "unknown record type '9'" in finding.message


def test_non_ascii_line_is_skipped_with_a_finding():
    content = person_line().encode("ascii") + b"\n" + b"1\xc3\xa9004104301 \n"
    decoded = decode_file(DICTIONARY, content, "B0004s001D.dat")
    assert len(decoded.records) == 1
    [finding] = decoded.findings
    assert finding.line == 2
    assert "non-ASCII" in finding.message


def test_malformed_numeric_becomes_missing_with_a_finding():
    line = person_line(age="x7")
    decoded = decode_file(DICTIONARY, data_bytes([line]), "B0004s001D.dat")
    [record] = decoded.records
    assert record.values["AGE"] is MISSING
    [finding] = decoded.findings
    assert finding.subject == "AGE"
    assert "malformed numeric" in finding.message


def test_negative_numbers_decode():
    line = person_line(age=-5)
    decoded = decode_file(DICTIONARY, data_bytes([line]), "B0004s001D.dat")
    assert decoded.records[0].values["AGE"] == -5


# --- Field checks ----------------------------------------------------------

def check_one(line):
    decoded = decode_file(DICTIONARY, data_bytes([line]), "B0004s001D.dat")
    assert decoded.findings == []
    return check_fields(DICTIONARY, decoded)


def test_range_check():
    [finding] = check_one(person_line(age=99, marital=2))
    assert finding.subject == "AGE"
    assert finding.message == "value 99 outside range 0-98"


def test_values_check():
    [finding] = check_one(person_line(sex=3, marital=2))
    assert finding.subject == "SEX"
    assert finding.message == "value 3 not in {1,2}"


def test_forbidden_blank():
    [finding] = check_one(person_line(age=None, marital=2))
    assert finding.subject == "AGE"
    assert finding.message == "blank not allowed"


def test_allowed_blank_is_silent():
    assert check_one(person_line(marital=None)) == []


# --- Rule evaluation -------------------------------------------------------

def test_rule_violation_yields_a_finding():
    decoded = decode_file(
        DICTIONARY,
        data_bytes([person_line(age=30, marital=2), person_line(age=7, marital=2)]),
        "B0004s001D.dat",
    )
    [finding] = check_rules(RULES, decoded)
    assert finding == Finding(
        "B0004s001D.dat", 2, "R001", "error", "child reported as married"
    )


def test_rule_touching_missing_is_not_violated():
    # AGE >= 12 is false and MARITAL == 1 is tainted, so no finding
    decoded = decode_file(
        DICTIONARY, data_bytes([person_line(age=7, marital=None)]), "B0004s001D.dat"
    )
    assert check_rules(RULES, decoded) == []


def test_missingness_test_is_exempt_from_taint():
    compiled = compile_expr(parse_expr("MARITAL == MISSING"))
    assert compiled({"MARITAL": MISSING}) is True
    assert compiled({"MARITAL": 2}) is False


def test_division_truncates_toward_zero():
    compiled = compile_expr(parse_expr("AGE / 2"))
    assert compiled({"AGE": 7}) == 3
    assert compiled({"AGE": -7}) == -3


def test_division_by_zero_taints():
    compiled = compile_expr(parse_expr("1 / AGE == 0"))
    with pytest.raises(_Tainted):
        compiled({"AGE": 0})
    assert rule_violated(compiled, {"AGE": 0}) is False


def test_and_does_not_short_circuit_around_taint():
    # left operand alone would decide a short-circuiting and
    compiled = compile_expr(parse_expr("AGE == 99 and SEX == 1"))
    assert rule_violated(compiled, {"AGE": 1, "SEX": MISSING}) is False


def test_compiled_evaluator_agrees_with_the_reference_interpreter():
    rng = random.Random(7)
    kinds = {"AGE": NUMERIC, "SEX": NUMERIC, "HH": NUMERIC, "NAME": ALPHA}
    for _ in range(400):
        expr = random_condition(rng, kinds)
        compiled = compile_expr(expr)
        for _ in range(5):
            env = random_env(rng, kinds)
            try:
                value, tainted = compiled(env), False
            except _Tainted:
                value, tainted = None, True
            ref_value, ref_tainted = reference_eval(expr, env)
            assert tainted == ref_tainted, (expr, env)
            if not tainted:
                assert value == ref_value, (expr, env)
            assert rule_violated(compiled, env) == reference_violated(expr, env)


# --- Household scope --------------------------------------------------------

HOUSEHOLD_RULE = PERSON_DICTIONARY + """
[rule H001]
scope = household
expr = US_ID == 4
message = stray unit in file
severity = warning
"""


def test_household_rules_run_once_per_contiguous_group():
    dictionary, rules = parse_dictionary(HOUSEHOLD_RULE)
    lines = [
        person_line(us_id="0004", hh=104),
        person_line(us_id="0004", hh=104),
        person_line(us_id="0005", hh=105),
        person_line(us_id="0004", hh=104),  # same key again, new group
    ]
    decoded = decode_file(dictionary, data_bytes(lines), "B0004s001D.dat")
    findings = [f for f in check_rules(rules, decoded) if f.subject == "H001"]
    assert [(f.line, f.severity) for f in findings] == [(3, "warning")]


def test_first_record_wins_inside_a_household():
    dictionary, rules = parse_dictionary(HOUSEHOLD_RULE)
    lines = [
        person_line(us_id="0004", hh=104),
        person_line(us_id="0005", hh=104),  # later record does not override
    ]
    decoded = decode_file(dictionary, data_bytes(lines), "B0004s001D.dat")
    assert [f for f in check_rules(rules, decoded) if f.subject == "H001"] == []


def test_blank_household_key_breaks_the_group():
    dictionary, rules = parse_dictionary(HOUSEHOLD_RULE)
    lines = [
        person_line(us_id="0005", hh=104),
        person_line(us_id="0004", hh=None),
        person_line(us_id="0005", hh=104),
    ]
    decoded = decode_file(dictionary, data_bytes(lines), "B0004s001D.dat")
    findings = [f for f in check_rules(rules, decoded) if f.subject == "H001"]
    assert [f.line for f in findings] == [1, 3]


# --- run_control and the listing -------------------------------------------

def test_listing_text_is_exact():
    files = [
        ("B0004s104D.dat", data_bytes([person_line(age=30), person_line(age=7, marital=2)])),
    ]
    listing = run_control(DICTIONARY, RULES, files, AT)
    assert listing.to_text() == (
        "CONTROL LISTING 2012-05-31T10:00:00 files=1\n"
        "B0004s104D.dat:2 error R001 child reported as married\n"
        "SUMMARY errors=1 warnings=0\n"
    )


def test_files_are_processed_in_name_order_whatever_the_input_order():
    files = [
        ("B0004s110D.dat", data_bytes([person_line(hh=110)])),
        ("B0004s104D.dat", data_bytes([person_line(hh=104)])),
    ]
    forward = run_control(DICTIONARY, RULES, files, AT)
    backward = run_control(DICTIONARY, RULES, list(reversed(files)), AT)
    assert forward.inputs == ("B0004s104D.dat", "B0004s110D.dat")
    assert forward.to_text() == backward.to_text()


def test_household_in_two_files_yields_one_warning():
    files = [
        ("B0004s104D.dat", data_bytes([person_line(hh=104)])),
        ("B0004s110D.dat", data_bytes([person_line(hh=104), person_line(hh=111)])),
    ]
    listing = run_control(DICTIONARY, RULES, files, AT)
    [finding] = listing.findings
    assert finding == Finding(
        "B0004s110D.dat", 1, "HOUSEHOLD", "warning", "household 104 appears in 2 files"
    )


def test_findings_are_sorted_by_file_line_subject():
    files = [
        ("B0004s110D.dat", data_bytes([person_line(age=7, sex=3, marital=2)])),
        ("B0004s104D.dat", data_bytes([person_line(age=99, marital=2), person_line(age=7, marital=2)])),
    ]
    listing = run_control(DICTIONARY, RULES, files, AT)
    keys = [(f.file, f.line, f.subject) for f in listing.findings]
    assert keys == sorted(keys)
    assert keys[0][0] == "B0004s104D.dat"


def test_summary_counts_match_recomputed_tallies():
    rng = random.Random(21)
    for _ in range(20):
        lines = [
            person_line(
                hh=rng.randint(100, 102),
                age=rng.choice([5, 30, 99, None]),
                sex=rng.choice([1, 2, 3]),
                marital=rng.choice([1, 2, None]),
            )
            for _ in range(rng.randint(1, 6))
        ]
        listing = run_control(DICTIONARY, RULES, [("B0004s104D.dat", data_bytes(lines))], AT)
        errors = sum(1 for f in listing.findings if f.severity == "error")
        warnings = sum(1 for f in listing.findings if f.severity == "warning")
        assert listing.error_count == errors
        assert listing.warning_count == warnings
        payload = listing.to_payload()
        assert payload["summary"] == {
            "errors": errors,
            "warnings": warnings,
            "by_subject": listing.by_subject(),
        }
        assert sum(payload["summary"]["by_subject"].values()) == len(listing.findings)


def test_empty_input_listing():
    listing = run_control(DICTIONARY, RULES, [], AT)
    assert listing.to_text() == (
        "CONTROL LISTING 2012-05-31T10:00:00 files=0\nSUMMARY errors=0 warnings=0\n"
    )


def test_extra_findings_merge_in_global_order():
    files = [("B0004s104D.dat", data_bytes([person_line(age=7, marital=2)]))]
    listing = run_control(DICTIONARY, RULES, files, AT)
    extra = Finding("0004", 1, "FINALITY", "warning", "declared final with 1/20 households")
    merged = with_extra_findings(listing, [extra])
    assert merged.findings[0] == extra
    assert merged.warning_count == listing.warning_count + 1
    assert isinstance(merged, ErrorListing)

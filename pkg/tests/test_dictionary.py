import random

import pytest

from panelvault.dictionary import (
    DataDictionary,
    DictionaryError,
    FieldSpec,
    RecordSpec,
    Rule,
    parse_dictionary,
    serialize_dictionary,
)
from panelvault.expressions import Compare, FieldRef, IntLit, Or

from fixtures import PERSON_DICTIONARY
from generators import random_dictionary


def header_line(header: str) -> int:
    return PERSON_DICTIONARY.splitlines().index(header) + 1


def test_person_fixture_structure():
    dictionary, rules = parse_dictionary(PERSON_DICTIONARY)
    assert dictionary == DataDictionary(
        "HOUSEHOLD",
        12,
        1,
        (
            RecordSpec(
                "1",
                "PERSON",
                (
                    FieldSpec("US_ID", 2, 4),
                    FieldSpec("HH_ID", 6, 3),
                    FieldSpec("AGE", 9, 2, value_range=(0, 98)),
                    FieldSpec("SEX", 11, 1, values=frozenset({1, 2})),
                    FieldSpec("MARITAL", 12, 1, values=frozenset({1, 2, 3, 4}),
                              blank_allowed=True),
                ),
                household_key="HH_ID",
            ),
        ),
    )
    assert rules == [
        Rule(
            "R001",
            "PERSON",
            Or(
                Compare(">=", FieldRef("AGE"), IntLit(12)),
                Compare("==", FieldRef("MARITAL"), IntLit(1)),
            ),
            "child reported as married",
            "error",
        )
    ]


def test_comments_and_blank_lines_are_ignored():
    noisy = "# layout for the household questionnaire\n\n" + PERSON_DICTIONARY
    assert parse_dictionary(noisy) == parse_dictionary(PERSON_DICTIONARY)


def reject(text: str) -> DictionaryError:
    with pytest.raises(DictionaryError) as err:
        parse_dictionary(text)
    return err.value


def test_field_past_the_record_end_is_rejected():
    text = PERSON_DICTIONARY.replace("start = 12\nlength = 1", "start = 12\nlength = 2")
    err = reject(text)
    assert "exceeds record length" in err.bare_message
    assert err.line == header_line("[field PERSON.MARITAL]")


def test_rule_referencing_unknown_field_is_rejected():
    text = PERSON_DICTIONARY.replace(
        "expr = AGE >= 12 or MARITAL == 1", "expr = AGEX >= 12"
    )
    err = reject(text)
    assert "unknown field" in err.bare_message
    assert err.line == header_line("[rule R001]")


def test_rule_must_be_a_condition():
    err = reject(PERSON_DICTIONARY.replace(
        "expr = AGE >= 12 or MARITAL == 1", "expr = AGE + 1"
    ))
    assert "not a condition" in err.bare_message


def test_malformed_rule_expression():
    err = reject(PERSON_DICTIONARY.replace(
        "expr = AGE >= 12 or MARITAL == 1", "expr = AGE >="
    ))
    assert "bad expression" in err.bare_message


def test_household_key_must_exist():
    err = reject(PERSON_DICTIONARY.replace("household_key = HH_ID", "household_key = NOPE"))
    assert "is not a field" in err.bare_message


def test_overlapping_fields_are_rejected():
    err = reject(PERSON_DICTIONARY.replace("[field PERSON.HH_ID]\nstart = 6",
                                           "[field PERSON.HH_ID]\nstart = 5"))
    assert "overlap" in err.bare_message


def test_field_on_the_type_position_is_rejected():
    err = reject(PERSON_DICTIONARY.replace("[field PERSON.US_ID]\nstart = 2",
                                           "[field PERSON.US_ID]\nstart = 1"))
    assert "type position" in err.bare_message


def test_inverted_range_is_rejected():
    err = reject(PERSON_DICTIONARY.replace("range = 0-98", "range = 98-0"))
    assert "inverted" in err.bare_message


def test_range_on_alpha_field_is_rejected():
    err = reject(PERSON_DICTIONARY.replace("kind = numeric\nrange = 0-98",
                                           "kind = alpha\nrange = 0-98"))
    assert "numeric fields only" in err.bare_message


def test_range_and_values_are_mutually_exclusive():
    err = reject(PERSON_DICTIONARY.replace("range = 0-98", "range = 0-98\nvalues = 1,2"))
    assert "mutually exclusive" in err.bare_message


def test_duplicate_type_codes_are_rejected():
    extra = "\n[record OTHER]\ntype_code = 1\n\n[field OTHER.X]\nstart = 2\nlength = 1\n"
    err = reject(PERSON_DICTIONARY + extra)
    assert "duplicate type code" in err.bare_message


def test_duplicate_rule_ids_are_rejected():
    extra = "\n[rule R001]\nrecord = PERSON\nexpr = AGE >= 0\nmessage = again\n"
    err = reject(PERSON_DICTIONARY + extra)
    assert "duplicate rule id" in err.bare_message


def test_household_rule_needs_a_keyed_record():
    text = PERSON_DICTIONARY.replace("household_key = HH_ID\n", "")
    text = text.replace("record = PERSON\nexpr", "scope = household\nexpr")
    err = reject(text)
    assert "household" in err.bare_message


def test_record_requires_a_type_code():
    err = reject(PERSON_DICTIONARY.replace("type_code = 1\n", ""))
    assert "missing type_code" in err.bare_message


def test_unknown_keys_are_rejected():
    err = reject(PERSON_DICTIONARY.replace("type_pos = 1", "type_pos = 1\nfoo = bar"))
    assert "unknown key" in err.bare_message


def test_error_message_carries_the_line_number():
    err = reject(PERSON_DICTIONARY.replace("range = 0-98", "range = zero"))
    assert str(err).startswith(f"line {err.line}: ")
    lines = PERSON_DICTIONARY.replace("range = 0-98", "range = zero").splitlines()
    assert lines[err.line - 1] == "range = zero"


def test_fixture_roundtrips_through_the_serializer():
    dictionary, rules = parse_dictionary(PERSON_DICTIONARY)
    canonical = serialize_dictionary(dictionary, rules)
    assert parse_dictionary(canonical) == (dictionary, rules)
    assert serialize_dictionary(*parse_dictionary(canonical)) == canonical


def test_random_dictionaries_roundtrip():
    for seed in range(50):
        rng = random.Random(1000 + seed)
        dictionary, rules = random_dictionary(rng, seed)
        text = serialize_dictionary(dictionary, rules)
        parsed_dictionary, parsed_rules = parse_dictionary(text)
        assert parsed_dictionary == dictionary
        assert parsed_rules == rules
        assert serialize_dictionary(parsed_dictionary, parsed_rules) == text

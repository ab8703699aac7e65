"""Hand-written fixtures used across the test modules."""

PERSON_DICTIONARY = """\
[dictionary]
name = HOUSEHOLD
record_length = 12
type_pos = 1

[record PERSON]
type_code = 1
household_key = HH_ID

[field PERSON.US_ID]
start = 2
length = 4
kind = numeric

[field PERSON.HH_ID]
start = 6
length = 3
kind = numeric

[field PERSON.AGE]
start = 9
length = 2
kind = numeric
range = 0-98

[field PERSON.SEX]
start = 11
length = 1
kind = numeric
values = 1,2

[field PERSON.MARITAL]
start = 12
length = 1
kind = numeric
values = 1,2,3,4
blank_allowed = yes

[rule R001]
record = PERSON
expr = AGE >= 12 or MARITAL == 1
message = child reported as married
severity = error
"""


def _cell(value, width: int) -> str:
    if value is None:
        return " " * width
    text = str(value)
    if len(text) > width:
        raise ValueError(f"{text!r} wider than {width}")
    return text.rjust(width)


def person_line(us_id="0004", hh=104, age=30, sex=1, marital=None) -> str:
    """One 12-column PERSON record; None renders a field blank."""
    return "1" + _cell(us_id, 4) + _cell(hh, 3) + _cell(age, 2) + _cell(sex, 1) + _cell(marital, 1)


def data_bytes(lines) -> bytes:
    return ("\n".join(lines) + "\n").encode("ascii") if lines else b""


# 14 controllers across four engineering offices
ROSTER_CSV = """\
code,name,surname,eo,assigned_us
C001,Karim,Alaoui,BADR,0004;0006
C002,Nadia,Berrada,BADR,0752
C003,Omar,Chraibi,BADR,0010
C101,Youssef,Idrissi,ESTE,0129
C102,Salma,Fassi,ESTE,0130;0131
C103,Hind,Tazi,ESTE,0132
C201,Adil,Bennis,NORD,0201
C202,Meryem,Tazi,NORD,0202
C203,Hamza,Ziani,NORD,0203
C204,Imane,Alami,NORD,0204
C301,Rachid,Mansouri,SUDO,0301
C302,Leila,Berrada,SUDO,0302
C303,Samir,Ouali,SUDO,0303
C304,Zineb,Kabbaj,SUDO,
"""

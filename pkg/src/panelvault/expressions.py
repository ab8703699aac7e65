"""Consistency-rule expression language.

Grammar (tightest to loosest binding):

    unary -                 -AGE
    * /                     integer multiply, truncating divide
    + -                     integer add, subtract
    == != < <= > >=         comparisons (non-chaining in practice)
    not                     applies to a whole comparison, Python style
    and
    or
    ( ... )                 parentheses override everything

Operands are integer literals, quoted string literals, field references,
and the special literal MISSING. A blank field decodes to MISSING; any
comparison or arithmetic that touches MISSING, other than an equality
test written against the MISSING literal itself, makes the enclosing
rule count as not violated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union


class ExprSyntaxError(ValueError):
    """Expression source that does not parse; column is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.bare_message = message
        self.column = column


class ResolutionError(ValueError):
    """Expression that parses but does not type-check against a record."""


class _MissingType:
    """Singleton for the MISSING value; compares only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"


MISSING = _MissingType()

Value = Union[int, str, _MissingType]


# --- AST ---------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class MissingLit:
    pass


@dataclass(frozen=True)
class FieldRef:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class Arith:
    op: str  # one of * / + -
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Compare:
    op: str  # one of == != < <= > >=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


Expr = Union[IntLit, StrLit, MissingLit, FieldRef, Neg, Not, Arith, Compare, And, Or]


# --- Lexer -------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int  # 1-based


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<NUMBER>\d+)
  | (?P<OP>==|!=|<=|>=|<|>|\+|-|\*|/|\(|\))
  | (?P<STRING>"[^"\n]*"|'[^'\n]*')
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"and", "or", "not", "MISSING"}


def _tokenize(source: str) -> Iterator[_Token]:
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos + 1)
        kind = match.lastgroup or ""
        text = match.group()
        if kind != "WS":
            if kind == "IDENT" and text in _KEYWORDS:
                kind = text.upper() if text != "MISSING" else "MISSING"
            yield _Token(kind, text, pos + 1)
        pos = match.end()
    yield _Token("EOF", "", len(source) + 1)


# --- Parser ------------------------------------------------------------

_COMPARE_OPS = {"==", "!=", "<", "<=", ">", ">="}


class _Parser:
    def __init__(self, source: str):
        self.tokens = list(_tokenize(source))
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect_op(self, op: str) -> None:
        token = self.peek()
        if token.kind != "OP" or token.text != op:
            raise ExprSyntaxError(f"expected {op!r}", token.column)
        self.advance()

    def parse(self) -> Expr:
        expr = self.parse_or()
        tail = self.peek()
        if tail.kind != "EOF":
            raise ExprSyntaxError(f"unexpected {tail.text!r}", tail.column)
        return expr

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.peek().kind == "OR":
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.peek().kind == "AND":
            self.advance()
            left = And(left, self.parse_not())
        return left

    def parse_not(self) -> Expr:
        if self.peek().kind == "NOT":
            self.advance()
            return Not(self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_additive()
        while self.peek().kind == "OP" and self.peek().text in _COMPARE_OPS:
            op = self.advance().text
            left = Compare(op, left, self.parse_additive())
        return left

    def parse_additive(self) -> Expr:
        left = self.parse_multiplicative()
        while self.peek().kind == "OP" and self.peek().text in ("+", "-"):
            op = self.advance().text
            left = Arith(op, left, self.parse_multiplicative())
        return left

    def parse_multiplicative(self) -> Expr:
        left = self.parse_unary()
        while self.peek().kind == "OP" and self.peek().text in ("*", "/"):
            op = self.advance().text
            left = Arith(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> Expr:
        if self.peek().kind == "OP" and self.peek().text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        token = self.peek()
        if token.kind == "NUMBER":
            self.advance()
            return IntLit(int(token.text))
        if token.kind == "STRING":
            self.advance()
            return StrLit(token.text[1:-1])
        if token.kind == "MISSING":
            self.advance()
            return MissingLit()
        if token.kind == "IDENT":
            self.advance()
            return FieldRef(token.text)
        if token.kind == "OP" and token.text == "(":
            self.advance()
            inner = self.parse_or()
            self.expect_op(")")
            return inner
        raise ExprSyntaxError(
            f"expected a value, got {token.text!r}" if token.kind != "EOF"
            else "unexpected end of expression",
            token.column,
        )


def parse_expr(source: str) -> Expr:
    """Parse expression source into an AST."""
    return _Parser(source).parse()


# --- Printer -----------------------------------------------------------

_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_CMP = 4
_PREC_ADD = 5
_PREC_MUL = 6
_PREC_NEG = 7
_PREC_ATOM = 8


def _precedence(expr: Expr) -> int:
    if isinstance(expr, Or):
        return _PREC_OR
    if isinstance(expr, And):
        return _PREC_AND
    if isinstance(expr, Not):
        return _PREC_NOT
    if isinstance(expr, Compare):
        return _PREC_CMP
    if isinstance(expr, Arith):
        return _PREC_ADD if expr.op in ("+", "-") else _PREC_MUL
    if isinstance(expr, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def format_expr(expr: Expr, full_parens: bool = False) -> str:
    """Render an AST back to source.

    With full_parens every compound node is parenthesized; otherwise
    parentheses appear only where precedence demands them. Both forms
    reparse to the identical tree.
    """
    text = _format(expr, full_parens)
    if full_parens and isinstance(expr, (Or, And, Not, Compare, Arith, Neg)):
        # top level needs no outer parentheses
        return text[1:-1] if text.startswith("(") else text
    return text


def _format(expr: Expr, full: bool) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, StrLit):
        if "'" not in expr.value:
            return f"'{expr.value}'"
        if '"' not in expr.value:
            return f'"{expr.value}"'
        raise ValueError("string literal mixes both quote characters")
    if isinstance(expr, MissingLit):
        return "MISSING"
    if isinstance(expr, FieldRef):
        return expr.name
    if isinstance(expr, Neg):
        inner = _wrap(expr.operand, _PREC_NEG, full)
        return f"(-{inner})" if full else f"-{inner}"
    if isinstance(expr, Not):
        inner = _wrap(expr.operand, _PREC_NOT, full)
        return f"(not {inner})" if full else f"not {inner}"
    if isinstance(expr, (Arith, Compare)):
        prec = _precedence(expr)
        left = _wrap(expr.left, prec, full)
        right = _wrap(expr.right, prec + 1, full)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if full else text
    if isinstance(expr, And):
        left = _wrap(expr.left, _PREC_AND, full)
        right = _wrap(expr.right, _PREC_AND + 1, full)
        return f"({left} and {right})" if full else f"{left} and {right}"
    if isinstance(expr, Or):
        left = _wrap(expr.left, _PREC_OR, full)
        right = _wrap(expr.right, _PREC_OR + 1, full)
        return f"({left} or {right})" if full else f"{left} or {right}"
    raise TypeError(f"not an expression node: {expr!r}")


def _wrap(expr: Expr, min_prec: int, full: bool) -> str:
    text = _format(expr, full)
    if full:
        return text
    if _precedence(expr) < min_prec:
        return f"({text})"
    return text


# --- Resolution --------------------------------------------------------

def resolve_expr(expr: Expr, field_kinds: Mapping[str, str]) -> str:
    """Type-check an expression against field name -> kind ("numeric"/"alpha").

    Returns the expression's type ("int", "str" or "bool"). The top level
    of a rule must come out "bool". Alpha fields may only be compared for
    equality against string literals or MISSING.
    """
    if isinstance(expr, IntLit):
        return "int"
    if isinstance(expr, StrLit):
        return "str"
    if isinstance(expr, MissingLit):
        return "missing"
    if isinstance(expr, FieldRef):
        kind = field_kinds.get(expr.name)
        if kind is None:
            raise ResolutionError(f"unknown field {expr.name!r}")
        return "int" if kind == "numeric" else "str"
    if isinstance(expr, Neg):
        if resolve_expr(expr.operand, field_kinds) != "int":
            raise ResolutionError("unary minus needs an integer operand")
        return "int"
    if isinstance(expr, Not):
        if resolve_expr(expr.operand, field_kinds) != "bool":
            raise ResolutionError("not needs a boolean operand")
        return "bool"
    if isinstance(expr, Arith):
        left = resolve_expr(expr.left, field_kinds)
        right = resolve_expr(expr.right, field_kinds)
        if left != "int" or right != "int":
            raise ResolutionError(f"arithmetic {expr.op!r} needs integer operands")
        return "int"
    if isinstance(expr, Compare):
        left = resolve_expr(expr.left, field_kinds)
        right = resolve_expr(expr.right, field_kinds)
        if expr.op in ("==", "!="):
            if "missing" in (left, right) or left == right:
                return "bool"
            raise ResolutionError(f"cannot compare {left} with {right}")
        if left == "int" and right == "int":
            return "bool"
        raise ResolutionError(f"ordering {expr.op!r} needs integer operands")
    if isinstance(expr, (And, Or)):
        left = resolve_expr(expr.left, field_kinds)
        right = resolve_expr(expr.right, field_kinds)
        if left != "bool" or right != "bool":
            raise ResolutionError("and/or need boolean operands")
        return "bool"
    raise TypeError(f"not an expression node: {expr!r}")


def referenced_fields(expr: Expr) -> set[str]:
    """All field names mentioned anywhere in the expression."""
    if isinstance(expr, FieldRef):
        return {expr.name}
    if isinstance(expr, (Neg, Not)):
        return referenced_fields(expr.operand)
    if isinstance(expr, (Arith, Compare, And, Or)):
        return referenced_fields(expr.left) | referenced_fields(expr.right)
    return set()

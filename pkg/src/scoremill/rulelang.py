"""Rule predicates and the boolean expression language.

Grammar (keywords case-insensitive, attribute names case-sensitive):

    expr       := or_expr
    or_expr    := and_expr ("OR" and_expr)*
    and_expr   := unary ("AND" unary)*
    unary      := "NOT" unary | primary
    primary    := "(" expr ")" | comparison
    comparison := attr cmp_op literal
                | attr "BETWEEN" number "AND" number
                | attr "IN" "(" literal ("," literal)* ")"
    cmp_op     := "==" | "!=" | "<" | "<=" | ">" | ">="
    attr       := IDENT | DQUOTED_NAME
    literal    := number | SQUOTED_TEXT | "TRUE" | "FALSE"

Precedence NOT > AND > OR, both binary operators left-associative.
BETWEEN is inclusive on both ends. Quotes double to escape ('' and "").
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import KindMismatch, MissingAttribute, ParseError
from .numeric import NUMERIC, AttrValue, decimal_text, encode_attr_value, kind_of

# ---------------------------------------------------------------------------
# AST

CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Compare:
    attr: str
    op: str
    literal: AttrValue


@dataclass(frozen=True)
class Between:
    attr: str
    lo: Fraction
    hi: Fraction


@dataclass(frozen=True)
class In:
    attr: str
    values: tuple[AttrValue, ...]


@dataclass(frozen=True)
class Not:
    operand: "ExprNode"


@dataclass(frozen=True)
class And:
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Or:
    left: "ExprNode"
    right: "ExprNode"


ExprNode = Union[Compare, Between, In, Not, And, Or]


def expr_attrs(node: ExprNode) -> frozenset[str]:
    """Attribute names referenced anywhere in the expression."""
    if isinstance(node, (Compare, Between, In)):
        return frozenset((node.attr,))
    if isinstance(node, Not):
        return expr_attrs(node.operand)
    return expr_attrs(node.left) | expr_attrs(node.right)


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = {"AND", "OR", "NOT", "BETWEEN", "IN", "TRUE", "FALSE"}

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"-?[0-9]+(\.[0-9]+)?")


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT NUMBER TEXT NAME keyword text, operator text, ( ) , EOF
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    n = len(source)
    last_end = 0
    while pos < n:
        ch = source[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        start = pos
        if ch.isalpha() or ch == "_":
            m = _IDENT_RE.match(source, pos)
            word = m.group(0)
            pos = m.end()
            upper = word.upper()
            kind = upper if upper in KEYWORDS else "IDENT"
            tokens.append(_Token(kind, word, start))
        elif ch.isdigit() or (ch == "-" and pos + 1 < n and source[pos + 1].isdigit()):
            m = _NUMBER_RE.match(source, pos)
            pos = m.end()
            tokens.append(_Token("NUMBER", m.group(0), start))
        elif ch == "'" or ch == '"':
            quote = ch
            pos += 1
            parts: list[str] = []
            while True:
                if pos >= n:
                    raise ParseError(start, "closing quote", "end of input")
                c = source[pos]
                if c == quote:
                    if pos + 1 < n and source[pos + 1] == quote:
                        parts.append(quote)
                        pos += 2
                        continue
                    pos += 1
                    break
                parts.append(c)
                pos += 1
            kind = "TEXT" if quote == "'" else "NAME"
            tokens.append(_Token(kind, "".join(parts), start))
        elif source.startswith(("==", "!=", "<=", ">="), pos):
            tokens.append(_Token(source[pos : pos + 2], source[pos : pos + 2], start))
            pos += 2
        elif ch in "<>":
            tokens.append(_Token(ch, ch, start))
            pos += 1
        elif ch in "(),":
            tokens.append(_Token(ch, ch, start))
            pos += 1
        else:
            raise ParseError(start, "a token", repr(ch))
        last_end = pos
    tokens.append(_Token("EOF", "", last_end))
    return tokens


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, label: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.offset, label, self._found(tok))
        return self.advance()

    @staticmethod
    def _found(tok: _Token) -> str:
        return "end of input" if tok.kind == "EOF" else repr(tok.text)

    def parse(self) -> ExprNode:
        node = self.or_expr()
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError(tok.offset, "end of input", self._found(tok))
        return node

    def or_expr(self) -> ExprNode:
        node = self.and_expr()
        while self.peek().kind == "OR":
            self.advance()
            node = Or(node, self.and_expr())
        return node

    def and_expr(self) -> ExprNode:
        node = self.unary()
        while self.peek().kind == "AND":
            self.advance()
            node = And(node, self.unary())
        return node

    def unary(self) -> ExprNode:
        if self.peek().kind == "NOT":
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> ExprNode:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            node = self.or_expr()
            self.expect(")", "')'")
            return node
        return self.comparison()

    def comparison(self) -> ExprNode:
        tok = self.peek()
        if tok.kind not in ("IDENT", "NAME"):
            raise ParseError(tok.offset, "an attribute name or '('", self._found(tok))
        attr = self.advance().text
        op = self.peek()
        if op.kind in CMP_OPS:
            self.advance()
            return Compare(attr, op.kind, self.literal())
        if op.kind == "BETWEEN":
            self.advance()
            lo = self.number()
            self.expect("AND", "'AND'")
            hi = self.number()
            return Between(attr, lo, hi)
        if op.kind == "IN":
            self.advance()
            self.expect("(", "'('")
            values = [self.literal()]
            while self.peek().kind == ",":
                self.advance()
                values.append(self.literal())
            self.expect(")", "')'")
            return In(attr, tuple(values))
        raise ParseError(op.offset, "a comparison operator, 'BETWEEN' or 'IN'", self._found(op))

    def literal(self) -> AttrValue:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            return _decimal_fraction(tok.text)
        if tok.kind == "TEXT":
            self.advance()
            return tok.text
        if tok.kind == "TRUE":
            self.advance()
            return True
        if tok.kind == "FALSE":
            self.advance()
            return False
        raise ParseError(tok.offset, "a literal", self._found(tok))

    def number(self) -> Fraction:
        tok = self.expect("NUMBER", "a number")
        return _decimal_fraction(tok.text)


def _decimal_fraction(text: str) -> Fraction:
    if "." in text:
        whole, frac = text.split(".")
        sign = -1 if whole.startswith("-") else 1
        return Fraction(int(whole) * 10 ** len(frac) + sign * int(frac), 10 ** len(frac))
    return Fraction(int(text))


def parse_expression(source: str) -> ExprNode:
    """Parse source text into an expression AST.

    Raises ParseError with the byte offset of the offending token.
    """
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Formatting

def _precedence(node: ExprNode) -> int:
    if isinstance(node, Or):
        return 1
    if isinstance(node, And):
        return 2
    if isinstance(node, Not):
        return 3
    return 4


def _format_attr(name: str) -> str:
    if _IDENT_RE.fullmatch(name) and name.upper() not in KEYWORDS:
        return name
    return '"' + name.replace('"', '""') + '"'


def format_literal(value: AttrValue) -> str:
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, Fraction):
        return decimal_text(value)
    return "'" + value.replace("'", "''") + "'"


def format_expression(node: ExprNode) -> str:
    """Canonical text: uppercase keywords, single spaces, minimal parens."""
    if isinstance(node, Compare):
        return f"{_format_attr(node.attr)} {node.op} {format_literal(node.literal)}"
    if isinstance(node, Between):
        return f"{_format_attr(node.attr)} BETWEEN {decimal_text(node.lo)} AND {decimal_text(node.hi)}"
    if isinstance(node, In):
        inner = ", ".join(format_literal(v) for v in node.values)
        return f"{_format_attr(node.attr)} IN ({inner})"
    if isinstance(node, Not):
        return "NOT " + _wrap(node.operand, 3, right=False)
    if isinstance(node, And):
        return _wrap(node.left, 2, right=False) + " AND " + _wrap(node.right, 2, right=True)
    if isinstance(node, Or):
        return _wrap(node.left, 1, right=False) + " OR " + _wrap(node.right, 1, right=True)
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(child: ExprNode, parent_prec: int, right: bool) -> str:
    text = format_expression(child)
    prec = _precedence(child)
    # equal precedence on the right needs parens to survive left association
    if prec < parent_prec or (right and prec == parent_prec):
        return "(" + text + ")"
    return text


# ---------------------------------------------------------------------------
# Evaluation

def _lookup(record, attr: str) -> AttrValue:
    try:
        return record.attributes[attr]
    except KeyError:
        raise MissingAttribute(attr) from None


def _numeric_value(attr: str, value: AttrValue) -> Fraction:
    kind = kind_of(value)
    if kind != NUMERIC:
        raise KindMismatch(attr, NUMERIC, kind)
    return value


def evaluate_expr(node: ExprNode, record) -> bool:
    """Evaluate an expression against a record.

    Referenced attributes must exist (MissingAttribute) and carry the kind
    an operator requires (KindMismatch). Both operands of AND/OR are always
    evaluated so data faults surface regardless of the other side.
    """
    if isinstance(node, Compare):
        value = _lookup(record, node.attr)
        literal_kind = kind_of(node.literal)
        value_kind = kind_of(value)
        if node.op in ("<", "<=", ">", ">="):
            if literal_kind != NUMERIC:
                raise KindMismatch(node.attr, NUMERIC, literal_kind)
            number = _numeric_value(node.attr, value)
            if node.op == "<":
                return number < node.literal
            if node.op == "<=":
                return number <= node.literal
            if node.op == ">":
                return number > node.literal
            return number >= node.literal
        if value_kind != literal_kind:
            raise KindMismatch(node.attr, literal_kind, value_kind)
        return (value == node.literal) if node.op == "==" else (value != node.literal)
    if isinstance(node, Between):
        number = _numeric_value(node.attr, _lookup(record, node.attr))
        return node.lo <= number <= node.hi
    if isinstance(node, In):
        value = _lookup(record, node.attr)
        value_kind = kind_of(value)
        set_kind = kind_of(node.values[0])
        if value_kind != set_kind:
            raise KindMismatch(node.attr, set_kind, value_kind)
        return value in node.values
    if isinstance(node, Not):
        return not evaluate_expr(node.operand, record)
    if isinstance(node, And):
        left = evaluate_expr(node.left, record)
        right = evaluate_expr(node.right, record)
        return left and right
    if isinstance(node, Or):
        left = evaluate_expr(node.left, record)
        right = evaluate_expr(node.right, record)
        return left or right
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Predicates

@dataclass(frozen=True)
class RangePredicate:
    min: Fraction
    max: Fraction
    min_inclusive: bool = True
    max_inclusive: bool = True

    def __post_init__(self):
        if self.min > self.max:
            raise ValueError(f"range min {decimal_text(self.min)} exceeds max {decimal_text(self.max)}")


@dataclass(frozen=True)
class EqualsPredicate:
    value: AttrValue


@dataclass(frozen=True)
class InSetPredicate:
    values: tuple[AttrValue, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("in-set predicate needs at least one value")
        kinds = {kind_of(v) for v in self.values}
        if len(kinds) != 1:
            raise ValueError("in-set values must share one kind")


@dataclass(frozen=True)
class ExprPredicate:
    ast: ExprNode
    source: str

    @classmethod
    def from_source(cls, source: str) -> "ExprPredicate":
        return cls(parse_expression(source), source)


Predicate = Union[RangePredicate, EqualsPredicate, InSetPredicate, ExprPredicate]


def predicate_attrs(predicate: Predicate, attr: str | None) -> frozenset[str]:
    if isinstance(predicate, ExprPredicate):
        return expr_attrs(predicate.ast)
    if attr is None:
        raise ValueError("non-expression predicate needs its attribute name")
    return frozenset((attr,))


def evaluate_predicate(predicate: Predicate, record, attr: str | None = None) -> bool:
    """Evaluate one predicate; non-expression forms apply to `attr`."""
    if isinstance(predicate, ExprPredicate):
        return evaluate_expr(predicate.ast, record)
    if attr is None:
        raise ValueError("non-expression predicate needs its attribute name")
    value = _lookup(record, attr)
    if isinstance(predicate, RangePredicate):
        number = _numeric_value(attr, value)
        low_ok = predicate.min <= number if predicate.min_inclusive else predicate.min < number
        high_ok = number <= predicate.max if predicate.max_inclusive else number < predicate.max
        return low_ok and high_ok
    if isinstance(predicate, EqualsPredicate):
        expected_kind = kind_of(predicate.value)
        found_kind = kind_of(value)
        if found_kind != expected_kind:
            raise KindMismatch(attr, expected_kind, found_kind)
        return value == predicate.value
    if isinstance(predicate, InSetPredicate):
        expected_kind = kind_of(predicate.values[0])
        found_kind = kind_of(value)
        if found_kind != expected_kind:
            raise KindMismatch(attr, expected_kind, found_kind)
        return value in predicate.values
    raise TypeError(f"not a predicate: {predicate!r}")


def match_rule(rule, record) -> bool:
    """True when every condition of the rule holds; empty conditions match."""
    for attr, predicate in rule.conditions.items():
        if not evaluate_predicate(predicate, record, attr):
            return False
    return True


def describe_predicate(predicate: Predicate) -> str:
    """Short human text for findings and nearest-miss explanations."""
    if isinstance(predicate, RangePredicate):
        lo, hi = decimal_text(predicate.min), decimal_text(predicate.max)
        if predicate.min_inclusive and predicate.max_inclusive:
            suffix = " (incl.)"
        elif not predicate.min_inclusive and not predicate.max_inclusive:
            suffix = " (excl.)"
        elif predicate.min_inclusive:
            suffix = " (excl. max)"
        else:
            suffix = " (excl. min)"
        return f"range {lo} – {hi}{suffix}"
    if isinstance(predicate, EqualsPredicate):
        return f"= {_plain_literal(predicate.value)}"
    if isinstance(predicate, InSetPredicate):
        return "in {" + ", ".join(_plain_literal(v) for v in predicate.values) + "}"
    if isinstance(predicate, ExprPredicate):
        return format_expression(predicate.ast)
    raise TypeError(f"not a predicate: {predicate!r}")


def _plain_literal(value: AttrValue) -> str:
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    encoded = encode_attr_value(value)
    return encoded if isinstance(encoded, str) else str(encoded)
